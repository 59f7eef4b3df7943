#include "dnls/nonlinearity.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dnls/errors.hpp"

namespace dnls
{
namespace
{
constexpr double kExpLimit = 700.0;
constexpr double kPanelStart = 0.5;
constexpr double kPanelWidth = 0.5;
constexpr int kCachedPanels = 128;

// |x|^e with a multiplication fast path for small integer exponents.
double pow_abs(double x, double e)
{
    const double ax = std::abs(x);
    const double r = std::round(e);
    if (r == e && r >= 0.0 && r <= 16.0)
    {
        double out = 1.0;
        for (int k = 0; k < static_cast<int>(r); ++k)
            out *= ax;
        return out;
    }
    return std::pow(ax, e);
}

void require_exponent(double e, const char* name)
{
    if (!std::isfinite(e) || e <= 2.0)
        throw UsageError(std::string("exponent ") + name + " must be finite and > 2");
}

void check_exp_range(double t)
{
    if (std::abs(t) > kExpLimit)
        throw std::range_error("exp-saturating nonlinearity overflows for |t| > 700");
}

// e^x - 1 - x for x >= 0 without cancellation near 0.
double exp_minus_linear(double x)
{
    if (x < 0.5)
    {
        double term = x * x / 2.0;
        double sum = 0.0;
        for (int k = 3; term > 1e-18 * sum || k < 4; ++k)
        {
            sum += term;
            term *= x / k;
        }
        return sum;
    }
    return std::expm1(x) - x;
}

// e^x - 1 - x - x^2/2 for x >= 0.
double exp_minus_quadratic(double x)
{
    if (x < 0.5)
    {
        double term = x * x * x / 6.0;
        double sum = 0.0;
        for (int k = 4; term > 1e-18 * sum || k < 5; ++k)
        {
            sum += term;
            term *= x / k;
        }
        return sum;
    }
    return std::expm1(x) - x - 0.5 * x * x;
}

double sgn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

} // namespace

std::string_view to_string(Family f)
{
    switch (f)
    {
    case Family::Power: return "power";
    case Family::TwoPowerSum: return "two_power_sum";
    case Family::TwoPowerDiff: return "two_power_diff";
    case Family::LogPower: return "log_power";
    case Family::ExpSaturating: return "exp_saturating";
    }
    return "unknown";
}

std::string_view to_string(Growth g)
{
    switch (g)
    {
    case Growth::Subcritical: return "subcritical";
    case Growth::Critical: return "critical";
    case Growth::Supercritical: return "supercritical";
    }
    return "unknown";
}

Family family_from_string(std::string_view name)
{
    for (auto f : {Family::Power, Family::TwoPowerSum, Family::TwoPowerDiff, Family::LogPower,
                   Family::ExpSaturating})
        if (to_string(f) == name)
            return f;
    throw UsageError("unknown nonlinearity family '" + std::string(name) + "'");
}

double critical_exponent(int dim)
{
    if (dim < 1)
        throw UsageError("dimension must be >= 1");
    return 2.0 + 4.0 / dim;
}

//---------------------------------------------------------------------------//

LogPowerTable::LogPowerTable(double s)
    : s_(s)
{
    cumulative_.reserve(kCachedPanels + 1);
    double acc = series(kPanelStart);
    cumulative_.push_back(acc);
    for (int k = 0; k < kCachedPanels; ++k)
    {
        const double lo = kPanelStart + k * kPanelWidth;
        acc += panel(lo, lo + kPanelWidth);
        cumulative_.push_back(acc);
    }
}

double LogPowerTable::series(double x) const
{
    if (x == 0.0)
        return 0.0;
    // ln(1+x) = sum_k (-1)^{k+1} x^k / k, integrated termwise against x^{s-1}.
    double xk = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 400; ++k)
    {
        xk *= x;
        const double term = xk / (k * (s_ + k));
        sum += (k % 2 == 1) ? term : -term;
        if (term < 1e-19 * std::abs(sum))
            break;
    }
    return std::pow(x, s_) * sum;
}

double LogPowerTable::panel(double lo, double hi) const
{
    const double s = s_;
    auto integrand = [s](double tau) { return std::pow(tau, s - 1.0) * std::log1p(tau); };
    return boost::math::quadrature::gauss<double, 16>::integrate(integrand, lo, hi);
}

double LogPowerTable::integral(double x) const
{
    if (x < 0.0)
        throw UsageError("log-power primitive table expects x >= 0");
    if (x <= kPanelStart)
        return series(x);
    const auto k = static_cast<std::size_t>((x - kPanelStart) / kPanelWidth);
    if (k < cumulative_.size() - 1)
    {
        const double lo = kPanelStart + static_cast<double>(k) * kPanelWidth;
        return cumulative_[k] + panel(lo, x);
    }
    double acc = cumulative_.back();
    double lo = kPanelStart + kCachedPanels * kPanelWidth;
    while (lo + kPanelWidth < x)
    {
        acc += panel(lo, lo + kPanelWidth);
        lo += kPanelWidth;
    }
    return acc + panel(lo, x);
}

//---------------------------------------------------------------------------//

Nonlinearity::Nonlinearity(Family family, double a, double b)
    : family_(family), a_(a), b_(b)
{
}

Nonlinearity Nonlinearity::power(double p)
{
    require_exponent(p, "p");
    return Nonlinearity(Family::Power, p, 0.0);
}

Nonlinearity Nonlinearity::two_power_sum(double s1, double s2)
{
    require_exponent(s1, "s1");
    require_exponent(s2, "s2");
    return Nonlinearity(Family::TwoPowerSum, s1, s2);
}

Nonlinearity Nonlinearity::two_power_diff(double s1, double s2)
{
    require_exponent(s1, "s1");
    require_exponent(s2, "s2");
    if (!(s1 < s2))
        throw UsageError("two_power_diff requires s1 < s2");
    return Nonlinearity(Family::TwoPowerDiff, s1, s2);
}

Nonlinearity Nonlinearity::log_power(double s1, double s2)
{
    require_exponent(s1, "s1");
    require_exponent(s2, "s2");
    Nonlinearity nl(Family::LogPower, s1, s2);
    nl.table_ = std::make_shared<const LogPowerTable>(s2);
    return nl;
}

Nonlinearity Nonlinearity::exp_saturating()
{
    return Nonlinearity(Family::ExpSaturating, 0.0, 0.0);
}

Nonlinearity Nonlinearity::from_parameters(Family family, std::optional<double> p,
                                           std::optional<double> s1, std::optional<double> s2)
{
    auto need = [](std::optional<double> v, const char* key) {
        if (!v)
            throw UsageError(std::string("nonlinearity parameter '") + key + "' is required");
        return *v;
    };
    switch (family)
    {
    case Family::Power: return power(need(p, "p"));
    case Family::TwoPowerSum: return two_power_sum(need(s1, "s1"), need(s2, "s2"));
    case Family::TwoPowerDiff: return two_power_diff(need(s1, "s1"), need(s2, "s2"));
    case Family::LogPower: return log_power(need(s1, "s1"), need(s2, "s2"));
    case Family::ExpSaturating: return exp_saturating();
    }
    throw UsageError("unknown family");
}

double Nonlinearity::value(double t) const
{
    if (!std::isfinite(t))
        throw UsageError("nonlinearity evaluated at a non-finite point");
    switch (family_)
    {
    case Family::Power: return pow_abs(t, a_ - 2.0) * t;
    case Family::TwoPowerSum: return (pow_abs(t, a_ - 2.0) + pow_abs(t, b_ - 2.0)) * t;
    case Family::TwoPowerDiff: return (pow_abs(t, a_ - 2.0) - pow_abs(t, b_ - 2.0)) * t;
    case Family::LogPower:
        return (pow_abs(t, a_ - 2.0) + pow_abs(t, b_ - 2.0) * std::log1p(std::abs(t))) * t;
    case Family::ExpSaturating:
        check_exp_range(t);
        return exp_minus_linear(std::abs(t)) * sgn(t);
    }
    return 0.0;
}

double Nonlinearity::primitive(double t) const
{
    if (!std::isfinite(t))
        throw UsageError("nonlinearity evaluated at a non-finite point");
    const double x = std::abs(t);
    switch (family_)
    {
    case Family::Power: return pow_abs(x, a_) / a_;
    case Family::TwoPowerSum: return pow_abs(x, a_) / a_ + pow_abs(x, b_) / b_;
    case Family::TwoPowerDiff: return pow_abs(x, a_) / a_ - pow_abs(x, b_) / b_;
    case Family::LogPower: return pow_abs(x, a_) / a_ + table_->integral(x);
    case Family::ExpSaturating:
        check_exp_range(t);
        return exp_minus_quadratic(x);
    }
    return 0.0;
}

double Nonlinearity::leading_exponent() const noexcept
{
    switch (family_)
    {
    case Family::Power: return a_;
    case Family::TwoPowerSum: return std::min(a_, b_);
    case Family::TwoPowerDiff: return a_;
    case Family::LogPower: return std::min(a_, b_ + 1.0); // ln(1+t) ~ t
    case Family::ExpSaturating: return 3.0;               // F ~ |t|^3 / 6
    }
    return 0.0;
}

Growth Nonlinearity::classify(int dim) const noexcept
{
    const double crit = 2.0 + 4.0 / dim;
    const double lead = leading_exponent();
    if (std::abs(lead - crit) <= 1e-9 * crit)
        return Growth::Critical;
    return lead < crit ? Growth::Subcritical : Growth::Supercritical;
}

bool Nonlinearity::certifies(Assumption a, int dim) const
{
    switch (a)
    {
    case Assumption::VanishingSlope: return true;
    case Assumption::EvenDominated: return true; // every family has odd f
    case Assumption::RatioNonDecreasing:
    case Assumption::RatioIncreasing: return family_ != Family::TwoPowerDiff;
    case Assumption::AboveKinetic: return zeta_witness(dim).has_value();
    case Assumption::CriticalBoundAtZero: return classify(dim) != Growth::Subcritical;
    case Assumption::SupercriticalBlowupAtZero: return classify(dim) == Growth::Subcritical;
    }
    return false;
}

double Nonlinearity::vanishing_slope_radius(double eps) const
{
    if (!(eps > 0.0))
        throw UsageError("eps must be positive");
    auto root = [](double bound, double e) { return std::min(1.0, std::pow(bound, 1.0 / e)); };
    switch (family_)
    {
    case Family::Power: return root(eps, a_ - 2.0);
    case Family::TwoPowerSum:
    case Family::TwoPowerDiff: return std::min(root(eps / 2, a_ - 2.0), root(eps / 2, b_ - 2.0));
    case Family::LogPower:
        // |t|^{s2-2} ln(1+|t|) <= |t|^{s2-1}
        return std::min(root(eps / 2, a_ - 2.0), root(eps / 2, b_ - 1.0));
    case Family::ExpSaturating:
        // (e^x - x - 1)/x <= (x/2) e^x <= (e/2) x on [0, 1]
        return std::min(1.0, 2.0 * eps / std::exp(1.0));
    }
    return 0.0;
}

std::optional<double> Nonlinearity::zeta_witness(int dim) const
{
    for (int k = 1; k <= 5000; ++k)
    {
        const double t = 0.01 * k;
        if (primitive(t) - 2.0 * dim * t * t > 0.0)
            return t;
    }
    return std::nullopt;
}

std::string Nonlinearity::describe() const
{
    std::ostringstream os;
    os << to_string(family_);
    switch (family_)
    {
    case Family::Power: os << "(p=" << a_ << ")"; break;
    case Family::ExpSaturating: break;
    default: os << "(s1=" << a_ << ", s2=" << b_ << ")"; break;
    }
    return os.str();
}

//---------------------------------------------------------------------------//

std::string_view to_string(TheoremMode m)
{
    switch (m)
    {
    case TheoremMode::Auto: return "auto";
    case TheoremMode::ThresholdRegime: return "threshold";
    case TheoremMode::Subcritical: return "subcritical";
    case TheoremMode::Unchecked: return "unchecked";
    }
    return "unknown";
}

TheoremMode theorem_mode_from_string(std::string_view name)
{
    for (auto m : {TheoremMode::Auto, TheoremMode::ThresholdRegime, TheoremMode::Subcritical,
                   TheoremMode::Unchecked})
        if (to_string(m) == name)
            return m;
    throw UsageError("unknown theorem mode '" + std::string(name) + "'");
}

TheoremMode certify(const Nonlinearity& nl, int dim, TheoremMode mode)
{
    if (mode == TheoremMode::Unchecked)
        return mode;
    if (mode == TheoremMode::Auto)
        mode = nl.classify(dim) == Growth::Subcritical ? TheoremMode::Subcritical
                                                       : TheoremMode::ThresholdRegime;

    std::vector<Assumption> needed{Assumption::VanishingSlope, Assumption::EvenDominated};
    if (mode == TheoremMode::ThresholdRegime)
        needed.push_back(Assumption::RatioNonDecreasing);
    else
        needed.push_back(Assumption::SupercriticalBlowupAtZero);

    for (auto a : needed)
        if (!nl.certifies(a, dim))
            throw UsageError(nl.describe() + " is not certified for " + std::string(to_string(mode)) +
                             " mode in dimension " + std::to_string(dim));

    if (nl.family() == Family::TwoPowerDiff && !(nl.second_exponent() > critical_exponent(dim)))
        throw UsageError("two_power_diff requires s1 < 2+4/N < s2");
    return mode;
}

} // namespace dnls
