#include "dnls/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dnls/errors.hpp"
#include "dnls/parallel.hpp"

namespace dnls
{
std::string_view to_string(EnergySign s)
{
    switch (s)
    {
    case EnergySign::Zero: return "zero";
    case EnergySign::Negative: return "negative";
    case EnergySign::Undetermined: return "undetermined";
    }
    return "unknown";
}

std::string_view to_string(ThresholdStatus s)
{
    switch (s)
    {
    case ThresholdStatus::Subcritical: return "subcritical";
    case ThresholdStatus::Bracketed: return "bracketed";
    case ThresholdStatus::AboveRange: return "above_range";
    case ThresholdStatus::Failed: return "failed";
    }
    return "unknown";
}

double weinstein_threshold(double p, double j)
{
    return std::pow(0.5 * p * j, 2.0 / (p - 2.0));
}

namespace
{
EnergySign sign_of(double e, double eps_zero, double eps_neg)
{
    if (e < -eps_neg)
        return EnergySign::Negative;
    if (e >= -eps_zero)
        return EnergySign::Zero;
    return EnergySign::Undetermined;
}

// Solve at m, growing the box while the sign stays undetermined.
ThresholdProbe probe(const SolveConfig& cfg, const Nonlinearity& nl, double m, double eps_zero, double eps_neg,
                     const char* phase)
{
    SolveConfig c = cfg;
    c.m = m;
    ThresholdProbe out;
    out.m = m;
    out.phase = phase;
    for (int side = cfg.side; side <= cfg.max_side; side += cfg.side_step)
    {
        const auto r = minimize_on_box(c, nl, make_box(cfg.dim, side));
        out.energy = r.energy;
        out.lattice_energy = r.lattice_energy;
        out.box_side = side;
        out.sign = sign_of(r.energy, eps_zero, eps_neg);
        if (out.sign != EnergySign::Undetermined)
            break;
    }
    return out;
}

} // namespace

ThresholdReport estimate_threshold(const SolveConfig& cfg, const Nonlinearity& nl, const ThresholdConfig& tcfg)
{
    cfg.validate();
    if (!(tcfg.m_start > 0.0) || !(tcfg.m_max >= tcfg.m_start))
        throw UsageError("threshold search needs 0 < m_start <= m_max");
    if (!(tcfg.resolution > 0.0))
        throw UsageError("threshold resolution must be positive");
    if (!(tcfg.eps_zero > 0.0) || !(tcfg.eps_neg >= tcfg.eps_zero))
        throw UsageError("threshold bands need 0 < eps_zero <= eps_neg");
    certify(nl, cfg.dim, cfg.mode);

    ThresholdReport rep;
    rep.growth = nl.classify(cfg.dim);
    rep.eps_zero = tcfg.eps_zero;
    rep.eps_neg = tcfg.eps_neg;
    rep.zeta = nl.zeta_witness(cfg.dim);
    if (tcfg.with_formula && nl.family() == Family::Power)
    {
        QuotientConfig qc = tcfg.quotient;
        qc.dim = cfg.dim;
        qc.workers = cfg.workers;
        rep.j_value = j_constant(nl.first_exponent(), qc).value;
        rep.formula_value = weinstein_threshold(nl.first_exponent(), *rep.j_value);
    }

    std::set<int> sides;
    auto record = [&](const ThresholdProbe& p) {
        rep.probes.push_back(p);
        sides.insert(p.box_side);
    };
    auto finish = [&] {
        rep.box_sides.assign(sides.begin(), sides.end());
        return rep;
    };

    if (rep.growth == Growth::Subcritical)
    {
        rep.status = ThresholdStatus::Subcritical;
        record(probe(cfg, nl, std::min(1.0, tcfg.m_max), rep.eps_zero, rep.eps_neg, "probe"));
        return finish();
    }

    // Undetermined probes first grow the box (inside probe), then widen eps_neg once.
    auto resolve = [&](ThresholdProbe p) {
        if (p.sign == EnergySign::Undetermined && !rep.widened)
        {
            rep.widened = true;
            rep.eps_neg = rep.eps_zero;
            rep.diagnostic = "undetermined energy at m = " + std::to_string(p.m) + "; eps_neg widened to eps_zero";
        }
        if (p.sign == EnergySign::Undetermined)
            p.sign = sign_of(p.energy, rep.eps_zero, rep.eps_neg);
        return p;
    };

    std::vector<double> scan;
    for (double m = tcfg.m_start; m <= tcfg.m_max; m *= 2.0)
        scan.push_back(m);
    if (scan.back() < tcfg.m_max)
        scan.push_back(tcfg.m_max);

    const std::size_t batch = resolve_workers(cfg.workers);
    std::optional<std::size_t> first_negative;
    for (std::size_t begin = 0; begin < scan.size() && !first_negative; begin += batch)
    {
        const auto count = std::min(batch, scan.size() - begin);
        const double eps_neg = rep.eps_neg;
        auto probes = parallel_map<ThresholdProbe>(count, cfg.workers, [&](std::size_t k) {
            return probe(cfg, nl, scan[begin + k], rep.eps_zero, eps_neg, "scan");
        });
        for (std::size_t k = 0; k < count; ++k)
        {
            auto p = resolve(std::move(probes[k]));
            record(p);
            if (p.sign == EnergySign::Negative)
            {
                first_negative = begin + k;
                break;
            }
        }
    }

    if (!first_negative)
    {
        rep.status = ThresholdStatus::AboveRange;
        rep.m_lo = tcfg.m_max;
        rep.m_hi = tcfg.m_max;
        rep.estimate = tcfg.m_max;
        rep.diagnostic = "no negative energy up to m_max: m* >= " + std::to_string(tcfg.m_max);
        return finish();
    }

    rep.m_hi = scan[*first_negative];
    rep.m_lo = *first_negative == 0 ? 0.0 : scan[*first_negative - 1];
    while (rep.m_hi - rep.m_lo > tcfg.resolution)
    {
        const double mid = 0.5 * (rep.m_lo + rep.m_hi);
        auto p = resolve(probe(cfg, nl, mid, rep.eps_zero, rep.eps_neg, "bisect"));
        record(p);
        ++rep.bisection_steps;
        (p.sign == EnergySign::Negative ? rep.m_hi : rep.m_lo) = mid;
    }
    rep.status = ThresholdStatus::Bracketed;
    rep.estimate = 0.5 * (rep.m_lo + rep.m_hi);
    return finish();
}

} // namespace dnls
