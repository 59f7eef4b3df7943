#include <chrono>
#include <functional>

#include "dnls/analysis.hpp"
#include "dnls/errors.hpp"
#include "dnls/parallel.hpp"

namespace dnls
{
std::string_view to_string(Suite s)
{
    switch (s)
    {
    case Suite::Core: return "core";
    case Suite::Thresholds: return "thresholds";
    case Suite::Certificates: return "certificates";
    case Suite::All: return "all";
    }
    return "unknown";
}

Suite suite_from_string(std::string_view name)
{
    if (name == "core")
        return Suite::Core;
    if (name == "thresholds")
        return Suite::Thresholds;
    if (name == "certificates")
        return Suite::Certificates;
    if (name == "all")
        return Suite::All;
    throw UsageError("unknown suite '" + std::string(name) + "' (expected core, thresholds, certificates or all)");
}

bool any_failed(const std::vector<CheckReport>& reports)
{
    for (const auto& r : reports)
        if (r.status == CheckStatus::Fail)
            return true;
    return false;
}

namespace
{
using Task = std::function<CheckReport()>;

CheckReport timed(const Task& task)
{
    const auto t0 = std::chrono::steady_clock::now();
    CheckReport r = task();
    r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<double> linspace(double lo, double hi, int count)
{
    std::vector<double> v;
    for (int i = 0; i < count; ++i)
        v.push_back(lo + (hi - lo) * i / (count - 1));
    return v;
}

} // namespace

std::vector<CheckReport> run_suite(const CheckContext& ctx, Suite suite)
{
    const int dim = ctx.solve.dim;
    const bool core = suite == Suite::Core || suite == Suite::All;
    const bool thresholds = suite == Suite::Thresholds || suite == Suite::All;
    const bool certificates = suite == Suite::Certificates || suite == Suite::All;

    // Checks inside a parallel suite run their own sweeps on one thread each.
    CheckContext inner = ctx;
    inner.solve.workers = 1;

    const auto sub = Nonlinearity::power(3.0);
    const auto sup = Nonlinearity::power(6.0);

    std::optional<double> m_star;
    if (thresholds || certificates)
    {
        SolveConfig cfg = ctx.solve;
        cfg.side = ctx.threshold_side;
        cfg.max_side = std::max(cfg.side, ctx.solve.max_side);
        ThresholdConfig t = ctx.threshold;
        t.with_formula = false;
        const auto r = estimate_threshold(cfg, sup, t);
        if (r.status == ThresholdStatus::Bracketed)
            m_star = r.estimate;
    }

    std::vector<Task> tasks;
    if (core)
    {
        tasks.push_back([=] { return check_structural_identities(inner); });
        tasks.push_back([=] { return check_hand_energies(inner); });
        tasks.push_back([=] { return check_rearrangement(inner); });
        tasks.push_back([=] { return check_gradient_oracle(inner); });
        tasks.push_back([=] { return check_boundedness(inner, Nonlinearity::power(4.0), {0.1, 1.0, 10.0}); });
        tasks.push_back([=] { return check_subadditivity(inner, sub, {0.25, 0.5, 1.0}); });
        tasks.push_back([=] { return check_subadditivity(inner, sup, {0.25, 0.5, 1.0}); });
        if (dim >= 2)
            tasks.push_back([=] { return check_gagliardo_nirenberg(inner, dim); });
    }
    if (thresholds)
    {
        if (dim == 2 || dim == 3)
            tasks.push_back([=] { return check_threshold_classification(inner, dim); });
        tasks.push_back([=] { return check_monotonicity_continuity(inner, sub, linspace(0.25, 4.0, 20)); });
        if (m_star)
        {
            const double ms = *m_star;
            tasks.push_back([=] { return check_monotonicity_continuity(inner, sup, linspace(0.1 * ms, 0.9 * ms, 9)); });
            tasks.push_back([=] { return check_nonachievement(inner, sup, 0.5 * ms, ms); });
            tasks.push_back([=] { return check_nonachievement(inner, sup, 2.0 * ms, ms); });
        }
    }
    if (certificates)
    {
        tasks.push_back([=] { return check_minimizer_certificates(inner, sub, 1.0); });
        if (m_star)
        {
            const double ms = *m_star;
            tasks.push_back([=] { return check_minimizer_certificates(inner, sup, 2.0 * ms); });
            tasks.push_back([=] { return check_minimizer_certificates(inner, sup, 0.5 * ms); });
        }
    }

    auto reports = parallel_map<CheckReport>(tasks.size(), ctx.solve.workers,
                                             [&](std::size_t i) { return timed(tasks[i]); });
    if ((thresholds || certificates) && !m_star)
    {
        CheckReport r;
        r.name = "threshold_estimate_power_6";
        r.claim = "the supercritical threshold could be bracketed for the dependent checks";
        r.status = CheckStatus::Fail;
        r.message = "no bracket found; threshold-dependent checks were not run";
        const std::string rel = "reproducers/threshold_estimate_power_6.json";
        write_json(ctx.resolved_out_dir() / rel, Json{{"message", r.message}});
        r.reproducers.push_back(rel);
        reports.push_back(r);
    }
    return reports;
}

} // namespace dnls
