#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dnls
{
enum class Family
{
    Power,         // |t|^{p-2} t
    TwoPowerSum,   // |t|^{s1-2} t + |t|^{s2-2} t
    TwoPowerDiff,  // |t|^{s1-2} t - |t|^{s2-2} t
    LogPower,      // |t|^{s1-2} t + |t|^{s2-2} t ln(1+|t|)
    ExpSaturating, // (e^{|t|} - |t| - 1) sgn t
};

/// Mass-critical classification relative to the exponent 2 + 4/N.
enum class Growth
{
    Subcritical,
    Critical,
    Supercritical,
};

/// Structural hypotheses on f that the family metadata can certify.
enum class Assumption
{
    VanishingSlope,         // f(t)/t -> 0 at 0
    RatioNonDecreasing,     // F(t)/t^2 non-decreasing on each half line
    EvenDominated,          // F(t) <= F(|t|)
    AboveKinetic,           // exists zeta > 0 with F(zeta) - 2N zeta^2 > 0
    CriticalBoundAtZero,    // limsup F(t)/|t|^{2+4/N} < inf
    RatioIncreasing,        // F(t)/t^2 strictly increasing on each half line
    SupercriticalBlowupAtZero, // F(t)/|t|^{2+4/N} -> +inf
};

std::string_view to_string(Family f);
std::string_view to_string(Growth g);
Family family_from_string(std::string_view name);

/// Critical exponent 2 + 4/N.
double critical_exponent(int dim);

class LogPowerTable;

/// Closed-form nonlinearity f with primitive F(t) = int_0^t f.
class Nonlinearity
{
public:
    static Nonlinearity power(double p);
    static Nonlinearity two_power_sum(double s1, double s2);
    static Nonlinearity two_power_diff(double s1, double s2);
    static Nonlinearity log_power(double s1, double s2);
    static Nonlinearity exp_saturating();

    /// Build from the config keys (family, p, s1, s2). Missing exponents are
    /// a UsageError for families that need them.
    static Nonlinearity from_parameters(Family family, std::optional<double> p,
                                        std::optional<double> s1, std::optional<double> s2);

    Family family() const noexcept { return family_; }
    /// Power exponent p (Power) or s1 (two-exponent families); 0 for ExpSaturating.
    double first_exponent() const noexcept { return a_; }
    double second_exponent() const noexcept { return b_; }

    /// f(t). Throws std::range_error for ExpSaturating with |t| > 700.
    double value(double t) const;
    /// F(t) = int_0^t f.
    double primitive(double t) const;

    /// Exponent e with F(t) ~ c |t|^e at 0, c > 0.
    double leading_exponent() const noexcept;
    Growth classify(int dim) const noexcept;

    bool certifies(Assumption a, int dim) const;

    /// Radius below which |f(t)/t| <= eps, derived from the family's term bounds.
    double vanishing_slope_radius(double eps) const;

    /// Smallest grid point zeta in (0, 50] with F(zeta) - 2N zeta^2 > 0, if any.
    std::optional<double> zeta_witness(int dim) const;

    std::string describe() const;

private:
    Nonlinearity(Family family, double a, double b);

    Family family_;
    double a_;
    double b_;
    std::shared_ptr<const LogPowerTable> table_;
};

/// int_0^x tau^{s-1} ln(1+tau) dtau for x >= 0: series below 1/2, panelled
/// 16-point Gauss-Legendre above, with cumulative panel sums cached.
class LogPowerTable
{
public:
    explicit LogPowerTable(double s);
    double integral(double x) const;
    /// Series branch; valid for 0 <= x < 1.
    double series(double x) const;

private:
    double panel(double lo, double hi) const;

    double s_;
    std::vector<double> cumulative_; // value at kPanelStart + k * kPanelWidth
};

/// Theorem mode a solver run is certified under.
enum class TheoremMode
{
    Auto,           // pick ThresholdRegime or Subcritical from the classification
    ThresholdRegime, // f1, f2, f3: threshold dichotomy with achieved minimisers above m*
    Subcritical,    // f1, f3, f7: achieved for every mass
    Unchecked,
};

std::string_view to_string(TheoremMode m);
TheoremMode theorem_mode_from_string(std::string_view name);

/// Resolve Auto and verify the family certifies every assumption the mode
/// needs. Throws UsageError otherwise.
TheoremMode certify(const Nonlinearity& nl, int dim, TheoremMode mode);

} // namespace dnls
