#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnls/constants.hpp"
#include "dnls/solver.hpp"

namespace dnls
{
/// Sign class of an energy estimate with respect to the two numerical-zero bands.
enum class EnergySign
{
    Zero,         // E >= -eps_zero
    Negative,     // E < -eps_neg
    Undetermined, // in between
};

std::string_view to_string(EnergySign s);

struct ThresholdConfig
{
    double m_start = 0.125; // first scan mass; the scan doubles from here
    double m_max = 64.0;
    double resolution = 0.01;
    double eps_zero = 1e-6;
    double eps_neg = 1e-4;
    /// Compute the Weinstein formula value for Power families.
    bool with_formula = true;
    QuotientConfig quotient;
};

struct ThresholdProbe
{
    double m = 0.0;
    double energy = 0.0;
    double lattice_energy = 0.0;
    int box_side = 0;
    EnergySign sign = EnergySign::Zero;
    std::string phase; // "scan", "bisect" or "probe"
};

enum class ThresholdStatus
{
    Subcritical, // m* = 0 from the classification
    Bracketed,
    AboveRange, // no negative energy up to m_max: m* >= m_max
    Failed,
};

std::string_view to_string(ThresholdStatus s);

struct ThresholdReport
{
    ThresholdStatus status = ThresholdStatus::Failed;
    Growth growth = Growth::Supercritical;
    double m_lo = 0.0;
    double m_hi = 0.0;
    double estimate = 0.0;
    double eps_zero = 0.0;
    double eps_neg = 0.0; // as used; may have been widened to eps_zero
    bool widened = false;
    int bisection_steps = 0;
    std::vector<int> box_sides;
    std::vector<ThresholdProbe> probes;
    std::optional<double> j_value;
    std::optional<double> formula_value; // ((p/2) J)^{2/(p-2)}
    std::optional<double> zeta;          // witness with F(zeta) > 2N zeta^2, if any
    std::string diagnostic;
};

/// Weinstein's threshold ((p/2) J)^{2/(p-2)}.
double weinstein_threshold(double p, double j);

/// Exponential scan for the first negative energy followed by bisection.
/// Subcritical families return m* = 0 together with one probe at min(1, m_max).
ThresholdReport estimate_threshold(const SolveConfig& cfg, const Nonlinearity& nl, const ThresholdConfig& tcfg);

} // namespace dnls
