#include "dnls/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "dnls/errors.hpp"
#include "dnls/parallel.hpp"
#include "dnls/summation.hpp"

namespace dnls
{
namespace fs = std::filesystem;

std::string_view to_string(CheckStatus s)
{
    switch (s)
    {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Measured: return "measured";
    case CheckStatus::Skipped: return "skipped";
    }
    return "unknown";
}

Json check_to_json(const CheckReport& r)
{
    Json j;
    j["name"] = r.name;
    j["claim"] = r.claim;
    j["status"] = std::string(to_string(r.status));
    j["parameters"] = r.parameters;
    j["witnesses"] = r.witnesses;
    j["reproducers"] = r.reproducers;
    j["message"] = r.message;
    return j;
}

CheckContext::CheckContext()
{
    solve.side = 41;
    solve.max_side = 61;
    quotient.sides = {21};
}

fs::path CheckContext::resolved_out_dir() const
{
    if (!out_dir.empty())
        return out_dir;
    return fs::temp_directory_path() / "dnls-checks";
}

MinimizeOutcome estimate_energy(const CheckContext& ctx, const Nonlinearity& nl, double m)
{
    SolveConfig cfg = ctx.solve;
    cfg.m = m;
    return minimize_on_box(cfg, nl, make_box(cfg.dim, cfg.side));
}

namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string dump_field(const CheckContext& ctx, const std::string& sub, const std::string& name, const Field& u)
{
    const auto rel = fs::path(sub) / (name + ".json");
    write_field(ctx.resolved_out_dir() / rel, u);
    return rel.generic_string();
}

std::string dump_json(const CheckContext& ctx, const std::string& name, const Json& j)
{
    const auto rel = fs::path("reproducers") / (name + ".json");
    write_json(ctx.resolved_out_dir() / rel, j);
    return rel.generic_string();
}

double rel_err(double a, double b)
{
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

// Every undirected edge {x, x + e_d} with at least one endpoint in the box,
// enumerated from coordinates instead of the neighbour table.
double edge_enumeration(const Field& u)
{
    const int dim = u.dim();
    const int h = u.box().half();
    CompensatedSum acc;
    Coord x(static_cast<std::size_t>(dim), -h - 1);
    while (true)
    {
        for (int d = 0; d < dim; ++d)
        {
            Coord y = x;
            ++y[static_cast<std::size_t>(d)];
            const double diff = u.at(y) - u.at(x);
            acc += diff * diff;
        }
        int d = dim - 1;
        while (d >= 0 && x[static_cast<std::size_t>(d)] == h)
        {
            x[static_cast<std::size_t>(d)] = -h - 1;
            --d;
        }
        if (d < 0)
            break;
        ++x[static_cast<std::size_t>(d)];
    }
    return acc.value();
}

std::vector<double> sorted_nonzero(const Field& u)
{
    std::vector<double> v;
    for (double x : u.values())
        if (x != 0.0)
            v.push_back(x);
    std::sort(v.begin(), v.end());
    return v;
}

bool same_function(const Field& a, const Field& b)
{
    const int side = std::max(a.side(), b.side());
    const Field x = a.resized(side), y = b.resized(side);
    return std::equal(x.values().begin(), x.values().end(), y.values().begin());
}

// max F(t)/t^2 over a grid of (0, r] including r; F is even.
double sampled_quadratic_bound(const Nonlinearity& nl, double r)
{
    double c = 0.0;
    for (int k = 1; k <= 1000; ++k)
    {
        const double t = r * k / 1000.0;
        c = std::max(c, std::abs(nl.primitive(t)) / (t * t));
    }
    return c;
}

Json outcome_witness(const MinimizeOutcome& r)
{
    Json j;
    j["energy"] = r.energy;
    j["lattice_energy"] = r.lattice_energy;
    j["spreading_bound_used"] = r.spreading_bound_used;
    j["lambda"] = r.multiplier;
    j["residual"] = r.residual;
    j["box_side"] = r.box_side;
    j["converged"] = r.converged;
    return j;
}

std::vector<MinimizeOutcome> estimate_many(const CheckContext& ctx, const Nonlinearity& nl,
                                           const std::vector<double>& masses)
{
    return parallel_map<MinimizeOutcome>(masses.size(), ctx.solve.workers,
                                         [&](std::size_t i) { return estimate_energy(ctx, nl, masses[i]); });
}

std::string tag(const Nonlinearity& nl)
{
    std::string s(to_string(nl.family()));
    if (nl.family() != Family::ExpSaturating)
        s += "_" + format_double(nl.first_exponent());
    if (nl.family() != Family::Power && nl.family() != Family::ExpSaturating)
        s += "_" + format_double(nl.second_exponent());
    return s;
}

} // namespace

//---------------------------------------------------------------------------//

CheckReport check_structural_identities(const CheckContext& ctx, int fields_per_dim, int side)
{
    CheckReport rep;
    rep.name = "structural_identities";
    rep.claim = "edge-sum identity, summation by parts, norm equivalence, l^p monotonicity and translation "
                "invariance hold on seeded random fields";
    rep.parameters = {{"fields_per_dim", fields_per_dim}, {"side", side}, {"dims", {1, 2, 3}}};

    double worst_edge = 0.0, worst_sbp = 0.0, worst_shift = 0.0, worst_equiv = 0.0;
    int lp_violations = 0;
    std::optional<Field> first_bad;
    for (int dim = 1; dim <= 3; ++dim)
    {
        for (int k = 0; k < fields_per_dim; ++k)
        {
            const auto seed = point_seed(ctx.solve.seed, dim, static_cast<std::uint64_t>(k));
            const Field u = random_sparse_field(dim, side, k % 2 ? 1.0 : 0.3, seed);
            const double d = dirichlet_energy(u);

            const Field halo = u.resized(side + 2);
            CompensatedSum grad_sum;
            for (std::size_t i = 0; i < halo.size(); ++i)
                grad_sum += grad_norm_sq_at(halo, halo.box().coord_of(i));
            const double edges = edge_enumeration(u);
            const double e1 = std::max(rel_err(grad_sum.value(), edges), rel_err(d, edges));

            const Field lap = laplacian(u);
            const double e2 = rel_err(-inner(lap, u), d);

            const double e3 = d / (4.0 * dim * mass(u));

            const double norms[] = {norm_lp(u, 1), norm_lp(u, 2), norm_lp(u, 4), norm_lp(u, kInf)};
            bool lp_ok = true;
            for (int a = 0; a < 3; ++a)
                lp_ok = lp_ok && norms[a + 1] <= norms[a] * (1.0 + 1e-15);
            lp_violations += lp_ok ? 0 : 1;

            Coord shift(static_cast<std::size_t>(dim));
            std::uint64_t s = seed;
            for (auto& c : shift)
            {
                s = splitmix64(s);
                c = static_cast<int>(s % 11) - 5;
            }
            const Field moved = shifted_into(u, shift, make_box(dim, side + 10));
            double e4 = rel_err(dirichlet_energy(moved), d);
            for (double p : {1.0, 2.0, 4.0, kInf})
                e4 = std::max(e4, rel_err(norm_lp(moved, p), norm_lp(u, p)));

            worst_edge = std::max(worst_edge, e1);
            worst_sbp = std::max(worst_sbp, e2);
            worst_equiv = std::max(worst_equiv, e3);
            worst_shift = std::max(worst_shift, e4);
            if (!first_bad && (e1 > 1e-12 || e2 > 1e-12 || e3 > 1.0 || e4 > 1e-12 || !lp_ok))
                first_bad = u;
        }
    }
    rep.witnesses = {{"max_rel_err_edge_sum", worst_edge},
                     {"max_rel_err_summation_by_parts", worst_sbp},
                     {"max_dirichlet_over_4N_mass", worst_equiv},
                     {"max_rel_err_translation", worst_shift},
                     {"lp_monotonicity_violations", lp_violations}};
    if (first_bad)
    {
        rep.status = CheckStatus::Fail;
        rep.message = "an identity exceeded its tolerance";
        rep.reproducers.push_back(dump_field(ctx, "reproducers", rep.name, *first_bad));
    }
    return rep;
}

CheckReport check_hand_energies(const CheckContext& ctx)
{
    CheckReport rep;
    rep.name = "hand_energies";
    rep.claim = "I(zeta delta_0) = N zeta^2 - F(zeta) and the kinetic energy of w_n is N m / n";
    const auto nl = Nonlinearity::power(4.0);
    rep.parameters = {{"spec", nonlinearity_to_json(nl)}, {"cases", Json::array()}};

    struct Case
    {
        int dim;
        double zeta, m;
        int n;
    };
    const Case cases[] = {{2, 1.0, 1.0, 4}, {3, 2.0, 1.0, 5}};
    Json rows = Json::array();
    bool ok = true;
    for (const auto& c : cases)
    {
        rep.parameters["cases"].push_back({{"dim", c.dim}, {"zeta", c.zeta}, {"m", c.m}, {"n", c.n}});
        const auto box = make_box(c.dim, c.n + 3 - (c.n % 2));
        const Field delta = make_test_function(DeltaKind{c.zeta}, box);
        const Field block = make_test_function(BoxKind{c.m, c.n}, box);
        const double f_zeta = std::pow(c.zeta, 4) / 4.0;
        const double delta_expected = c.dim * c.zeta * c.zeta - f_zeta;
        const double delta_value = energy(delta, nl);
        const double kinetic_expected = c.dim * c.m / c.n;
        const double kinetic_value = 0.5 * dirichlet_energy(block);
        const double e1 = std::abs(delta_value - delta_expected) / std::max(1.0, std::abs(delta_expected));
        const double e2 = std::abs(kinetic_value - kinetic_expected) / std::max(1.0, kinetic_expected);
        ok = ok && e1 <= 1e-12 && e2 <= 1e-12;
        const double stated = 2.0 * c.dim * c.zeta * c.zeta - f_zeta;
        rows.push_back({{"dim", c.dim},
                        {"delta_energy", delta_value},
                        {"delta_expected", delta_expected},
                        {"stated_closed_form", stated},
                        {"discrepancy_vs_stated", stated - delta_value},
                        {"block_kinetic", kinetic_value},
                        {"block_kinetic_expected", kinetic_expected}});
        if (!(e1 <= 1e-12 && e2 <= 1e-12))
            rep.reproducers.push_back(
                dump_field(ctx, "reproducers", rep.name + "_dim" + std::to_string(c.dim), block));
    }
    rep.witnesses = {{"cases", rows}};
    rep.message = "direct computation gives N zeta^2 - F(zeta); the stated closed form 2N zeta^2 - F(zeta) "
                  "exceeds it by N zeta^2";
    if (!ok)
        rep.status = CheckStatus::Fail;
    return rep;
}

CheckReport check_rearrangement(const CheckContext& ctx, int fields, int side_1d, int side_2d)
{
    CheckReport rep;
    rep.name = "rearrangement";
    rep.claim = "Schwarz rearrangement preserves the value multiset and is idempotent; the Dirichlet energy does "
                "not increase for N = 1; the N = 2 violation rate of the default ordering is measured";
    rep.parameters = {{"fields", fields}, {"side_1d", side_1d}, {"side_2d", side_2d}, {"ordering", "l1shell"}};

    int multiset_failures = 0, idempotence_failures = 0, ps1_violations = 0, ps2_violations = 0;
    double worst_ps2 = 0.0;
    std::vector<std::string> ps2_files;
    const auto ord1 = SiteOrdering::first_sites(OrderingStrategy::L1ShellLex, 1, static_cast<std::size_t>(side_1d));
    const auto ord2 =
        SiteOrdering::first_sites(OrderingStrategy::L1ShellLex, 2, static_cast<std::size_t>(side_2d * side_2d));
    static constexpr double densities[] = {0.05, 0.2, 0.6, 1.0};
    for (int k = 0; k < fields; ++k)
    {
        for (int dim : {1, 2})
        {
            const int side = dim == 1 ? side_1d : side_2d;
            const auto& ord = dim == 1 ? ord1 : ord2;
            const auto seed = point_seed(ctx.solve.seed, 10.0 * dim, static_cast<std::uint64_t>(k));
            const Field u = random_sparse_field(dim, side, densities[k % 4], seed, true);
            const Field r = schwarz_rearrange(u, ord);
            if (sorted_nonzero(u) != sorted_nonzero(r) || value_multiset_hash(u) != value_multiset_hash(r))
                ++multiset_failures;
            if (!same_function(schwarz_rearrange(r, ord), r))
                ++idempotence_failures;
            const double before = dirichlet_energy(u), after = dirichlet_energy(r);
            if (after > before * (1.0 + 1e-12))
            {
                if (dim == 1)
                {
                    ++ps1_violations;
                    if (ps1_violations <= 10)
                        rep.reproducers.push_back(
                            dump_field(ctx, "violations", "polya_szego_1d_" + std::to_string(k), u));
                }
                else
                {
                    ++ps2_violations;
                    worst_ps2 = std::max(worst_ps2, after / before - 1.0);
                    if (ps2_violations <= 10)
                        ps2_files.push_back(dump_field(ctx, "violations", "polya_szego_2d_" + std::to_string(k), u));
                }
            }
        }
    }
    rep.witnesses = {{"multiset_failures", multiset_failures},
                     {"idempotence_failures", idempotence_failures},
                     {"polya_szego_1d_violations", ps1_violations},
                     {"polya_szego_2d_violations", ps2_violations},
                     {"polya_szego_2d_rate", static_cast<double>(ps2_violations) / fields},
                     {"polya_szego_2d_worst_relative_increase", worst_ps2},
                     {"polya_szego_2d_reproducers", ps2_files}};
    if (multiset_failures + idempotence_failures + ps1_violations > 0)
    {
        rep.status = CheckStatus::Fail;
        rep.message = "rearrangement invariant violated";
        if (rep.reproducers.empty())
            rep.reproducers.push_back(dump_json(ctx, rep.name, rep.witnesses));
    }
    else
    {
        rep.message = "N = 2 Polya-Szego violations are measured, not asserted";
    }
    return rep;
}

CheckReport check_gradient_oracle(const CheckContext& ctx, int fields)
{
    CheckReport rep;
    rep.name = "gradient_oracle";
    rep.claim = "euclidean_gradient matches central differences of the energy (h = 1e-6) to 1e-6 relative";
    const std::vector<Nonlinearity> families{Nonlinearity::power(3.0),
                                             Nonlinearity::power(4.0),
                                             Nonlinearity::power(6.0),
                                             Nonlinearity::two_power_sum(3.0, 5.0),
                                             Nonlinearity::two_power_diff(3.0, 5.0),
                                             Nonlinearity::log_power(3.0, 4.0),
                                             Nonlinearity::exp_saturating()};
    rep.parameters = {{"fields", fields}, {"h", 1e-6}, {"side", 9}};
    const double h = 1e-6;
    double worst = 0.0;
    Json per_family = Json::object();
    std::optional<Field> bad;
    for (int k = 0; k < fields; ++k)
    {
        const auto& nl = families[static_cast<std::size_t>(k) % families.size()];
        const int dim = 1 + k % 3;
        const auto seed = point_seed(ctx.solve.seed, 100.0 + k, 0);
        const Field u = random_sparse_field(dim, 9, 0.5, seed);
        const Field v = random_sparse_field(dim, 9, 1.0, splitmix64(seed));
        const double analytic = inner(euclidean_gradient(u, nl), v);
        const double numeric = (energy(u + h * v, nl) - energy(u + (-h) * v, nl)) / (2.0 * h);
        const double scale =
            std::max(std::abs(analytic), 1e-3 * std::sqrt(mass(euclidean_gradient(u, nl)) * mass(v)));
        const double err = std::abs(analytic - numeric) / std::max(scale, 1e-300);
        worst = std::max(worst, err);
        auto key = tag(nl);
        per_family[key] = std::max(per_family.value(key, 0.0), err);
        if (err > 1e-6 && !bad)
            bad = u;
    }
    rep.witnesses = {{"max_rel_err", worst}, {"max_rel_err_by_family", per_family}};
    if (bad)
    {
        rep.status = CheckStatus::Fail;
        rep.reproducers.push_back(dump_field(ctx, "reproducers", rep.name, *bad));
    }
    return rep;
}

//---------------------------------------------------------------------------//

CheckReport check_boundedness(const CheckContext& ctx, const Nonlinearity& nl, const std::vector<double>& m_values)
{
    CheckReport rep;
    rep.name = "boundedness_" + tag(nl);
    rep.claim = "-C m <= E_m <= 0 (within eps_zero), with C = sup F(t)/t^2 on [-sqrt(m), sqrt(m)]; block test "
                "functions give I(w_n) <= N m / n + m eps(n)";
    rep.parameters = {{"spec", nonlinearity_to_json(nl)}, {"m", m_values}, {"dim", ctx.solve.dim},
                      {"side", ctx.solve.side}, {"eps_zero", ctx.threshold.eps_zero}};
    const auto results = estimate_many(ctx, nl, m_values);
    Json rows = Json::array();
    bool ok = true;
    const int dim = ctx.solve.dim;
    for (std::size_t i = 0; i < m_values.size(); ++i)
    {
        const double m = m_values[i];
        const auto& r = results[i];
        const double c = sampled_quadratic_bound(nl, std::sqrt(m));
        const bool upper = r.energy <= ctx.threshold.eps_zero;
        const bool lower = r.energy >= -c * m;

        Json blocks = Json::array();
        bool blocks_ok = true;
        for (int n = 1; n <= 32; n *= 2)
        {
            const auto box = make_box(dim, n + 3 - (n % 2));
            const Field w = make_test_function(BoxKind{m, n}, box);
            const double e = energy(w, nl);
            const double a = std::sqrt(m) * std::pow(static_cast<double>(n), -0.5 * dim);
            const double eps_n = sampled_quadratic_bound(nl, a);
            const double bound = dim * m / n + m * eps_n;
            blocks_ok = blocks_ok && e <= bound * (1.0 + 1e-12) + 1e-15;
            blocks.push_back({{"n", n}, {"energy", e}, {"bound", bound}});
        }
        ok = ok && upper && lower && blocks_ok;
        Json row = outcome_witness(r);
        row["m"] = m;
        row["lower_bound"] = -c * m;
        row["block_test_functions"] = blocks;
        rows.push_back(row);
        if (!(upper && lower && blocks_ok))
            rep.reproducers.push_back(
                dump_field(ctx, "reproducers", rep.name + "_m" + format_double(m), r.minimizer));
    }
    rep.witnesses = {{"points", rows}};
    if (!ok)
        rep.status = CheckStatus::Fail;
    return rep;
}

CheckReport check_subadditivity(const CheckContext& ctx, const Nonlinearity& nl, const std::vector<double>& grid)
{
    CheckReport rep;
    rep.name = "subadditivity_" + tag(nl);
    rep.claim = "E_{a+b} <= E_a + E_b + 1e-6 on the grid, every energy within [-C m, eps_zero], and disjointly "
                "supported pieces have additive energy";
    rep.parameters = {{"spec", nonlinearity_to_json(nl)}, {"grid", grid}, {"dim", ctx.solve.dim},
                      {"side", ctx.solve.side}};
    std::set<double> needed(grid.begin(), grid.end());
    for (double a : grid)
        for (double b : grid)
            needed.insert(a + b);
    const std::vector<double> masses(needed.begin(), needed.end());
    const auto results = estimate_many(ctx, nl, masses);
    std::map<double, const MinimizeOutcome*> by_mass;
    for (std::size_t i = 0; i < masses.size(); ++i)
        by_mass[masses[i]] = &results[i];

    bool ok = true;
    Json pairs = Json::array();
    double worst_gap = -kInf;
    for (double a : grid)
        for (double b : grid)
        {
            const double lhs = by_mass[a + b]->energy;
            const double rhs = by_mass[a]->energy + by_mass[b]->energy;
            worst_gap = std::max(worst_gap, lhs - rhs);
            const bool holds = lhs <= rhs + 1e-6;
            ok = ok && holds;
            pairs.push_back({{"a", a}, {"b", b}, {"E_a_plus_b", lhs}, {"E_a_plus_E_b", rhs}, {"holds", holds}});
        }

    Json energies = Json::array();
    bool bounded = true;
    for (const auto& [m, r] : by_mass)
    {
        const double c = sampled_quadratic_bound(nl, std::sqrt(m));
        const bool in = r->energy <= ctx.threshold.eps_zero && r->energy >= -c * m;
        bounded = bounded && in;
        energies.push_back({{"m", m}, {"energy", r->energy}, {"lower_bound", -c * m}, {"within_bounds", in}});
    }

    // Translated copies of two minimisers and a flat block, pairwise at distance >= 2.
    const Field& ua = by_mass[grid.front()]->minimizer;
    const Field& ub = by_mass[grid.back()]->minimizer;
    const int dim = ctx.solve.dim;
    const int s = ua.side();
    const int K = s + 1;
    const auto big = make_box(dim, 2 * (K + ua.box().half()) + 1);
    const Field block = make_test_function(BoxKind{grid.front(), 3}, make_box(dim, 3));
    Coord shift_a(static_cast<std::size_t>(dim), 0), shift_b(static_cast<std::size_t>(dim), 0);
    shift_a[0] = -K;
    shift_b[0] = K;
    const Coord centre(static_cast<std::size_t>(dim), 0);
    const Field composite =
        shifted_into(ua, shift_a, big) + shifted_into(ub, shift_b, big) + shifted_into(block, centre, big);
    const double parts = energy(ua, nl) + energy(ub, nl) + energy(block, nl);
    const double whole = energy(composite, nl);
    const double additivity_err = std::abs(whole - parts) / std::max(1.0, std::abs(parts));
    const bool additive = additivity_err <= 1e-12;

    rep.witnesses = {{"pairs", pairs},
                     {"max_gap", worst_gap},
                     {"energies", energies},
                     {"disjoint_support",
                      {{"shift", K},
                       {"energy_of_union", whole},
                       {"sum_of_energies", parts},
                       {"mass_of_union", mass(composite)},
                       {"relative_error", additivity_err}}}};
    if (!(ok && bounded && additive))
    {
        rep.status = CheckStatus::Fail;
        rep.message = !ok ? "subadditivity violated" : !bounded ? "energy outside [-C m, eps_zero]"
                                                                : "disjoint-support energies not additive";
        rep.reproducers.push_back(dump_field(ctx, "reproducers", rep.name + "_union", composite));
    }
    return rep;
}

CheckReport check_monotonicity_continuity(const CheckContext& ctx, const Nonlinearity& nl,
                                          const std::vector<double>& m_grid)
{
    CheckReport rep;
    rep.name = "monotonicity_" + tag(nl);
    rep.claim = "m -> E_m is non-increasing (within 1e-6); increments are fitted against 1 - sqrt(m/(m+delta))";
    rep.parameters = {{"spec", nonlinearity_to_json(nl)}, {"m", m_grid}, {"dim", ctx.solve.dim},
                      {"side", ctx.solve.side}};
    const auto results = estimate_many(ctx, nl, m_grid);
    Json steps = Json::array();
    int violations = 0, strict_steps = 0;
    double c_all = 0.0, c_first = 0.0, c_second = 0.0;
    const std::size_t half = (m_grid.size() - 1) / 2;
    for (std::size_t i = 0; i + 1 < m_grid.size(); ++i)
    {
        const double inc = results[i].energy - results[i + 1].energy;
        const double shape = 1.0 - std::sqrt(m_grid[i] / m_grid[i + 1]);
        const double ratio = inc / shape;
        if (inc < -1e-6)
            ++violations;
        if (inc > 1e-4)
            ++strict_steps;
        c_all = std::max(c_all, ratio);
        (i < half ? c_first : c_second) = std::max(i < half ? c_first : c_second, ratio);
        steps.push_back({{"m", m_grid[i]}, {"m_next", m_grid[i + 1]}, {"decrease", inc}, {"ratio", ratio}});
    }
    Json energies = Json::array();
    for (std::size_t i = 0; i < m_grid.size(); ++i)
        energies.push_back({{"m", m_grid[i]}, {"energy", results[i].energy}});
    const double spread = (c_first > 0.0 && c_second > 0.0) ? std::max(c_first, c_second) / std::min(c_first, c_second)
                                                            : kInf;
    rep.witnesses = {{"energies", energies},
                     {"steps", steps},
                     {"monotonicity_violations", violations},
                     {"steps_decreasing_by_more_than_1e-4", strict_steps},
                     {"fitted_C", c_all},
                     {"fitted_C_first_half", c_first},
                     {"fitted_C_second_half", c_second},
                     {"fitted_C_half_ratio", std::isfinite(spread) ? Json(spread) : Json(nullptr)}};
    if (violations > 0)
    {
        rep.status = CheckStatus::Fail;
        rep.message = "energy increased along the mass grid";
        rep.reproducers.push_back(dump_json(ctx, rep.name, rep.witnesses));
    }
    return rep;
}

//---------------------------------------------------------------------------//

CheckReport check_threshold_classification(const CheckContext& ctx, int dim)
{
    if (dim != 2 && dim != 3)
        throw UsageError("threshold classification is defined for dim 2 and 3");
    CheckReport rep;
    rep.name = "threshold_classification_dim" + std::to_string(dim);
    rep.claim = "subcritical families have m* = 0; critical and supercritical powers have 0 < m* < m_max; the "
                "critical estimate matches ((p/2) J)^{2/(p-2)} within 5%; m* < zeta^2 when a witness exists";
    const double crit = critical_exponent(dim);
    const std::vector<Nonlinearity> cases{Nonlinearity::power(3.0), Nonlinearity::power(crit),
                                          Nonlinearity::power(6.0), Nonlinearity::exp_saturating()};
    SolveConfig cfg = ctx.solve;
    cfg.dim = dim;
    cfg.side = ctx.threshold_side;
    cfg.max_side = std::max(cfg.side, std::min(ctx.solve.max_side, ctx.threshold_side + 2 * cfg.side_step));
    ThresholdConfig tcfg = ctx.threshold;
    tcfg.quotient = ctx.quotient;
    rep.parameters = {{"dim", dim}, {"m_max", tcfg.m_max}, {"resolution", tcfg.resolution},
                      {"side", cfg.side}, {"eps_zero", tcfg.eps_zero}, {"eps_neg", tcfg.eps_neg}};

    const auto reports = parallel_map<ThresholdReport>(cases.size(), ctx.solve.workers, [&](std::size_t i) {
        ThresholdConfig t = tcfg;
        t.with_formula = cases[i].classify(dim) == Growth::Critical;
        SolveConfig c = cfg;
        c.workers = 1;
        return estimate_threshold(c, cases[i], t);
    });

    bool ok = true;
    Json rows = Json::array();
    for (std::size_t i = 0; i < cases.size(); ++i)
    {
        const auto& nl = cases[i];
        const auto& r = reports[i];
        Json row = threshold_to_json(r, nl);
        bool case_ok = true;
        if (r.growth == Growth::Subcritical)
        {
            case_ok = r.status == ThresholdStatus::Subcritical && r.estimate == 0.0;
        }
        else
        {
            case_ok = r.status == ThresholdStatus::Bracketed && r.estimate > 0.0 && r.estimate < tcfg.m_max;
            if (r.growth == Growth::Critical && r.formula_value)
            {
                const double dev = std::abs(r.estimate - *r.formula_value) / *r.formula_value;
                row["formula_relative_deviation"] = dev;
                case_ok = case_ok && dev <= 0.05;
            }
            if (r.zeta)
            {
                row["zeta_squared"] = *r.zeta * *r.zeta;
                case_ok = case_ok && r.estimate < *r.zeta * *r.zeta;
            }
        }
        row["pass"] = case_ok;
        ok = ok && case_ok;
        rows.push_back(row);
    }
    rep.witnesses = {{"cases", rows}};
    if (!ok)
    {
        rep.status = CheckStatus::Fail;
        rep.message = "threshold classification mismatch";
        rep.reproducers.push_back(dump_json(ctx, rep.name, rep.witnesses));
    }
    return rep;
}

CheckReport check_minimizer_certificates(const CheckContext& ctx, const Nonlinearity& nl, double m)
{
    CheckReport rep;
    rep.name = "certificates_" + tag(nl) + "_m" + format_double(m);
    rep.claim = "a negative-energy minimiser satisfies the Euler-Lagrange equation, is nonnegative, is Schwarz "
                "symmetric under the default ordering and has mass exactly m";
    rep.parameters = {{"spec", nonlinearity_to_json(nl)}, {"m", m}, {"dim", ctx.solve.dim},
                      {"side", ctx.solve.side}, {"residual_tol", ctx.residual_tol},
                      {"schwarz_tol", ctx.schwarz_tol}, {"mass_tol", ctx.mass_tol},
                      {"ordering", std::string(to_string(ctx.solve.ordering))}};
    const auto r = estimate_energy(ctx, nl, m);
    Json w = outcome_witness(r);
    if (!(r.energy < -ctx.threshold.eps_neg))
    {
        rep.status = CheckStatus::Skipped;
        rep.message = "not in achieved regime";
        rep.witnesses = w;
        return rep;
    }
    const Field& u = r.minimizer;
    const double res_bound = ctx.residual_tol * std::max(1.0, std::sqrt(mass(u)));
    const double defect = schwarz_defect(u, ctx.solve.ordering);
    const double mass_err = std::abs(mass(u) - m) / m;
    const double lowest = min_value(u);

    // Strict positivity on the connected positive component holding the maximum.
    const auto& box = u.box();
    const auto top = static_cast<std::size_t>(
        std::distance(u.values().begin(), std::max_element(u.values().begin(), u.values().end())));
    std::vector<char> seen(u.size(), 0);
    std::vector<std::size_t> stack{top};
    seen[top] = 1;
    std::size_t component = 0;
    while (!stack.empty())
    {
        const auto i = stack.back();
        stack.pop_back();
        ++component;
        for (int k = 0; k < 2 * box.dim(); ++k)
        {
            const auto j = box.neighbor(i, k);
            if (j >= 0 && !seen[static_cast<std::size_t>(j)] && u[static_cast<std::size_t>(j)] > 0.0)
            {
                seen[static_cast<std::size_t>(j)] = 1;
                stack.push_back(static_cast<std::size_t>(j));
            }
        }
    }

    const bool res_ok = r.residual <= res_bound;
    const bool nonneg = lowest >= 0.0;
    const bool symmetric = defect <= ctx.schwarz_tol;
    const bool mass_ok = mass_err <= ctx.mass_tol;
    w["residual_bound"] = res_bound;
    w["residual_ok"] = res_ok;
    w["min_value"] = lowest;
    w["nonnegative"] = nonneg;
    w["schwarz_defect"] = defect;
    w["schwarz_symmetric"] = symmetric;
    w["relative_mass_error"] = mass_err;
    w["mass_ok"] = mass_ok;
    w["positive_component_sites"] = component;
    w["box_sites"] = u.size();
    rep.witnesses = w;
    if (!(res_ok && nonneg && symmetric && mass_ok))
    {
        rep.status = CheckStatus::Fail;
        std::string failed;
        for (auto [flag, what] : {std::pair{res_ok, "residual"}, std::pair{nonneg, "nonnegativity"},
                                  std::pair{symmetric, "schwarz_symmetry"}, std::pair{mass_ok, "mass"}})
            if (!flag)
                failed += (failed.empty() ? "" : ", ") + std::string(what);
        rep.message = "failed certificates: " + failed;
        rep.reproducers.push_back(dump_field(ctx, "reproducers", rep.name, u));
    }
    return rep;
}

CheckReport check_nonachievement(const CheckContext& ctx, const Nonlinearity& nl, double m, double m_star,
                                 const std::vector<int>& sides)
{
    CheckReport rep;
    const bool below = m < m_star;
    rep.name = std::string(below ? "nonachievement_" : "localization_") + tag(nl) + "_m" + format_double(m);
    rep.claim = below ? "below the threshold the energy is zero within eps_zero and the minimising iterates "
                        "spread (sup norm decreases as the box grows)"
                      : "above the threshold the same measurement shows a localised minimiser";
    rep.parameters = {{"spec", nonlinearity_to_json(nl)}, {"m", m}, {"m_star_estimate", m_star},
                      {"dim", ctx.solve.dim}, {"sides", sides}};
    SolveConfig cfg = ctx.solve;
    cfg.m = m;
    cfg.workers = 1;
    const auto results = parallel_map<MinimizeOutcome>(sides.size(), ctx.solve.workers, [&](std::size_t i) {
        SolveConfig c = cfg;
        c.side = sides[i];
        c.max_side = std::max(c.max_side, sides[i]);
        return minimize_on_box(c, nl, make_box(cfg.dim, sides[i]));
    });
    Json rows = Json::array();
    bool decreasing = true, in_band = true, contradiction = false;
    for (std::size_t i = 0; i < results.size(); ++i)
    {
        const auto& r = results[i];
        const double sup = norm_lp(r.minimizer, kInf);
        if (i > 0 && !(sup < norm_lp(results[i - 1].minimizer, kInf)))
            decreasing = false;
        in_band = in_band && std::abs(r.energy) <= ctx.threshold.eps_zero;
        contradiction = contradiction || r.energy < -ctx.threshold.eps_neg;
        Json row = outcome_witness(r);
        row["sup_norm"] = sup;
        row["boundary_mass"] = r.boundary_mass;
        rows.push_back(row);
    }
    rep.witnesses = {{"sides", rows},
                     {"sup_norm_decreasing", decreasing},
                     {"energy_within_eps_zero", in_band},
                     {"trend", decreasing ? "spreading" : "localized"}};
    rep.status = CheckStatus::Measured;
    if (below && contradiction)
    {
        rep.status = CheckStatus::Fail;
        rep.message = "negative energy below the threshold estimate";
        rep.reproducers.push_back(dump_field(ctx, "reproducers", rep.name, results.back().minimizer));
    }
    return rep;
}

CheckReport check_gagliardo_nirenberg(const CheckContext& ctx, int dim, int samples)
{
    CheckReport rep;
    rep.name = "gagliardo_nirenberg_dim" + std::to_string(dim);
    rep.claim = "||u||_p^p <= C (1 + 1e-9) D(u) ||u||_2^{4/N} with C = 1/J, p = 2 + 4/N, on random fields; "
                "for N >= 3 the Sobolev inequality likewise";
    const int side = dim <= 2 ? 21 : 11;
    QuotientConfig qc = ctx.quotient;
    qc.dim = dim;
    qc.sides = {side};
    qc.workers = ctx.solve.workers;
    rep.parameters = {{"dim", dim}, {"samples", samples}, {"side", side}, {"seed", ctx.solve.seed}};
    const auto r = gn_verify(dim, samples, side, ctx.solve.seed, qc);
    Json w = constants_to_json(r);
    const bool j_bounded = r.j.value <= 2.0 * dim * (1.0 + 1e-12);
    bool blocks_ok = true;
    for (const auto& b : r.block_slack)
        blocks_ok = blocks_ok && b.lhs <= b.rhs * (1.0 + 1e-9);
    const int violations = r.gn.violations + (r.sobolev_check ? r.sobolev_check->violations : 0);
    w["j_at_most_2N"] = j_bounded;
    rep.witnesses = w;
    int k = 0;
    for (const auto& f : r.gn.counterexamples)
        rep.reproducers.push_back(dump_field(ctx, "reproducers", rep.name + "_gn_" + std::to_string(k++), f));
    if (r.sobolev_check)
        for (const auto& f : r.sobolev_check->counterexamples)
            rep.reproducers.push_back(
                dump_field(ctx, "reproducers", rep.name + "_sobolev_" + std::to_string(k++), f));
    if (violations > 0 || !j_bounded || !blocks_ok)
    {
        rep.status = CheckStatus::Fail;
        rep.message = violations > 0 ? "inequality violated: J is overestimated, rerun with more starts"
                                     : "constant sanity bound failed";
        if (rep.reproducers.empty())
            rep.reproducers.push_back(dump_field(ctx, "reproducers", rep.name + "_minimizer", r.j.minimizer));
    }
    return rep;
}

} // namespace dnls
