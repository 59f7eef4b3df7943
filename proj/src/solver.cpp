#include "dnls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dnls/errors.hpp"
#include "dnls/parallel.hpp"
#include "dnls/summation.hpp"
#include "dnls/test_functions.hpp"

namespace dnls
{
std::string_view to_string(Initializer i)
{
    switch (i)
    {
    case Initializer::BoxProfile: return "box";
    case Initializer::Delta: return "delta";
    case Initializer::Gaussian: return "gaussian";
    case Initializer::SymmetrizedRandom: return "random";
    }
    return "unknown";
}

Initializer initializer_from_string(std::string_view name)
{
    if (name == "box")
        return Initializer::BoxProfile;
    if (name == "delta")
        return Initializer::Delta;
    if (name == "gaussian")
        return Initializer::Gaussian;
    if (name == "random")
        return Initializer::SymmetrizedRandom;
    throw UsageError("unknown initializer '" + std::string(name) + "'");
}

void SolveConfig::validate() const
{
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw UsageError(std::string(what) + " must be a positive finite number");
    };
    if (dim < 1)
        throw UsageError("dim must be >= 1");
    positive(m, "m");
    if (side < 3 || side % 2 == 0)
        throw UsageError("side must be an odd integer >= 3");
    if (max_side < side || max_side % 2 == 0)
        throw UsageError("max_side must be odd and >= side");
    if (side_step < 2 || side_step % 2 != 0)
        throw UsageError("side_step must be a positive even integer");
    positive(initial_step, "initial_step");
    if (!(backtrack > 0.0 && backtrack < 1.0))
        throw UsageError("backtrack factor must lie in (0, 1)");
    positive(min_step, "min_step");
    positive(max_step, "max_step");
    if (min_step > max_step)
        throw UsageError("min_step exceeds max_step");
    positive(energy_tol, "energy_tol");
    positive(residual_tol, "residual_tol");
    positive(boundary_tol, "boundary_tol");
    positive(descent_tol, "descent_tol");
    if (max_iterations < 1)
        throw UsageError("max_iterations must be >= 1");
    if (initializers.empty())
        throw UsageError("at least one initializer is required");
    if (symmetrize_every < 0)
        throw UsageError("symmetrize_every must be >= 0");
    if (ordering == OrderingStrategy::Custom)
        throw UsageError("the solver needs a geometric ordering");
}

//---------------------------------------------------------------------------//

double energy(const Field& u, const Nonlinearity& nl)
{
    CompensatedSum potential;
    for (double v : u.values())
        potential += nl.primitive(v);
    return 0.5 * dirichlet_energy(u) - potential.value();
}

Field euclidean_gradient(const Field& u, const Nonlinearity& nl)
{
    Field g = laplacian(u);
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] = -g[i] - nl.value(u[i]);
    return g;
}

Multiplier lagrange_multiplier(const Field& u, const Nonlinearity& nl)
{
    const double m = mass(u);
    if (!(m > 0.0))
        throw UsageError("multiplier of the zero field is undefined");
    Field g = euclidean_gradient(u, nl);
    const double lambda = inner(g, u) / m;
    CompensatedSum r;
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        const double d = g[i] - lambda * u[i];
        r += d * d;
    }
    return {lambda, std::sqrt(r.value())};
}

double block_energy(const Nonlinearity& nl, int dim, double m, double n)
{
    const double volume = std::pow(n, dim);
    return dim * m / n - volume * nl.primitive(std::sqrt(m / volume));
}

SpreadingBound spreading_energy_bound(const Nonlinearity& nl, int dim, double m)
{
    SpreadingBound best{std::numeric_limits<double>::infinity(), 1.0};
    for (int k = 0; k <= 40; ++k)
    {
        const double n = std::ldexp(1.0, k);
        double e = 0.0;
        try
        {
            e = block_energy(nl, dim, m, n);
        }
        catch (const std::range_error&)
        {
            continue;
        }
        if (e < best.energy)
            best = {e, n};
    }
    return best;
}

//---------------------------------------------------------------------------//

namespace
{
struct Descent
{
    Field u;
    double energy = 0.0;
    int iterations = 0;
    bool converged = false;
};

void project_to_sphere(Field& v, double m)
{
    for (auto& x : v.values())
        x = std::abs(x);
    const double current = mass(v);
    if (!(current > 0.0))
        throw std::runtime_error("projected iterate vanished");
    v *= std::sqrt(m / current);
}

Descent descend(Field u, const SolveConfig& cfg, const Nonlinearity& nl, const std::vector<std::size_t>& order,
                int budget)
{
    const double m = cfg.m;
    const double res_target = cfg.residual_tol * std::max(1.0, std::sqrt(m));
    project_to_sphere(u, m);
    double e = energy(u, nl);

    std::optional<Field> prev_u, prev_pg;
    double tau = cfg.initial_step;
    Descent out{u, e, 0, false};
    int it = 0;
    for (; it < budget; ++it)
    {
        Field pg = euclidean_gradient(u, nl);
        const double lambda = inner(pg, u) / m;
        for (std::size_t i = 0; i < pg.size(); ++i)
            pg[i] -= lambda * u[i];
        if (std::sqrt(mass(pg)) <= res_target)
        {
            out.converged = true;
            break;
        }

        if (cfg.barzilai_borwein && prev_u)
        {
            CompensatedSum ss, sy;
            for (std::size_t i = 0; i < u.size(); ++i)
            {
                const double s = u[i] - (*prev_u)[i];
                const double y = pg[i] - (*prev_pg)[i];
                ss += s * s;
                sy += s * y;
            }
            tau = sy.value() > 0.0 ? ss.value() / sy.value() : cfg.initial_step;
        }
        tau = std::clamp(tau, cfg.min_step, cfg.max_step);

        bool accepted = false;
        Field v(u.box_ptr());
        double ev = e;
        while (tau > 1e-14)
        {
            v = u;
            for (std::size_t i = 0; i < v.size(); ++i)
                v[i] -= tau * pg[i];
            project_to_sphere(v, m);
            ev = energy(v, nl);
            if (ev <= e + cfg.descent_tol)
            {
                accepted = true;
                break;
            }
            tau *= cfg.backtrack;
        }
        if (!accepted)
            break; // no descent direction left at working precision

        prev_u = std::move(u);
        prev_pg = std::move(pg);
        u = std::move(v);
        e = ev;

        if (cfg.symmetrize_every > 0 && (it + 1) % cfg.symmetrize_every == 0)
        {
            Field r = schwarz_rearrange_in_box(u, order);
            const double er = energy(r, nl);
            if (er <= e)
            {
                u = std::move(r);
                e = er;
                prev_u.reset();
                prev_pg.reset();
                tau = cfg.initial_step;
            }
        }
    }
    out.u = std::move(u);
    out.energy = e;
    out.iterations = it;
    return out;
}

Field initial_field(Initializer init, const SolveConfig& cfg, const BoxPtr& box, const std::vector<std::size_t>& order,
                    std::uint64_t seed)
{
    const int side = box->side();
    switch (init)
    {
    case Initializer::BoxProfile:
        return make_test_function(BoxKind{cfg.m, std::max(1, side / 3)}, box);
    case Initializer::Delta:
        return make_test_function(DeltaKind{std::sqrt(cfg.m)}, box);
    case Initializer::Gaussian:
        return make_test_function(GaussianKind{cfg.m, std::max(1.0, side / 8.0)}, box);
    case Initializer::SymmetrizedRandom:
    {
        Field u(box);
        std::uint64_t state = seed;
        for (auto& x : u.values())
        {
            state = splitmix64(state);
            x = unit_double(state);
        }
        u = schwarz_rearrange_in_box(u, order);
        u *= std::sqrt(cfg.m / mass(u));
        return u;
    }
    }
    throw UsageError("unknown initializer");
}

} // namespace

namespace
{
MinimizeOutcome solve_box(const SolveConfig& cfg, const Nonlinearity& nl, const BoxPtr& box,
                          const std::optional<Field>& warm_start, bool fresh_starts)
{
    cfg.validate();
    certify(nl, cfg.dim, cfg.mode);
    if (!box || box->dim() != cfg.dim)
        throw UsageError("box dimension does not match the configuration");

    const auto order = SiteOrdering::first_sites(cfg.ordering, cfg.dim, 1).restricted_to(*box);

    struct Start
    {
        std::string name;
        Field u;
    };
    std::vector<Start> starts;
    if (warm_start)
        starts.push_back({"warm", warm_start->resized(box->side())});
    for (std::size_t k = 0; fresh_starts && k < cfg.initializers.size(); ++k)
    {
        const auto seed = point_seed(cfg.seed, cfg.m, static_cast<std::uint64_t>(box->side()) * 64 + k);
        starts.push_back({std::string(to_string(cfg.initializers[k])),
                          initial_field(cfg.initializers[k], cfg, box, order, seed)});
    }

    std::optional<Descent> best;
    std::string best_name;
    for (auto& s : starts)
    {
        Descent d = descend(std::move(s.u), cfg, nl, order, cfg.max_iterations);
        // Final guarded symmetrisation pass, re-polishing after each accepted rearrangement.
        if (cfg.symmetrize_every > 0)
        {
            for (int pass = 0; pass < 3; ++pass)
            {
                Field r = schwarz_rearrange_in_box(d.u, order);
                const double er = energy(r, nl);
                if (!(er <= d.energy) || std::equal(r.values().begin(), r.values().end(), d.u.values().begin()))
                    break;
                const int used = d.iterations;
                d = descend(std::move(r), cfg, nl, order, std::max(1, cfg.max_iterations - used));
                d.iterations += used;
            }
        }
        if (!best || d.energy < best->energy)
        {
            best = std::move(d);
            best_name = s.name;
        }
    }

    MinimizeOutcome out(best->u);
    out.lattice_energy = best->energy;
    const auto bound = spreading_energy_bound(nl, cfg.dim, cfg.m);
    out.energy = std::min(out.lattice_energy, bound.energy);
    out.spreading_bound_used = bound.energy < out.lattice_energy;
    const auto mult = lagrange_multiplier(out.minimizer, nl);
    out.multiplier = mult.lambda;
    out.residual = mult.residual;
    out.iterations = best->iterations;
    out.converged = out.residual <= cfg.residual_tol * std::max(1.0, std::sqrt(cfg.m));
    out.stabilized = out.converged;
    out.boundary_mass = boundary_mass(out.minimizer);
    out.box_side = box->side();
    out.initializer = best_name;
    out.sides_tried = {box->side()};
    out.sup_norms = {norm_lp(out.minimizer, std::numeric_limits<double>::infinity())};
    out.side_energies = {out.lattice_energy};
    if (!out.converged)
        out.diagnostic = "residual above tolerance after " + std::to_string(out.iterations) + " iterations";
    return out;
}

} // namespace

MinimizeOutcome minimize_on_box(const SolveConfig& cfg, const Nonlinearity& nl, const BoxPtr& box,
                                const std::optional<Field>& warm_start)
{
    return solve_box(cfg, nl, box, warm_start, true);
}

MinimizeOutcome minimize_adaptive(const SolveConfig& cfg, const Nonlinearity& nl)
{
    cfg.validate();
    std::optional<MinimizeOutcome> prev;
    std::vector<int> sides;
    std::vector<double> sups, energies;
    for (int side = cfg.side; side <= cfg.max_side; side += cfg.side_step)
    {
        std::optional<Field> warm;
        if (prev)
            warm = prev->minimizer;
        // Larger boxes continue from the previous minimiser; the full multistart runs once.
        MinimizeOutcome cur = solve_box(cfg, nl, make_box(cfg.dim, side), warm, !prev);
        sides.push_back(side);
        sups.push_back(cur.sup_norms.front());
        energies.push_back(cur.lattice_energy);

        const bool contained = cur.boundary_mass <= cfg.boundary_tol * cfg.m;
        const bool steady = prev && std::abs(cur.lattice_energy - prev->lattice_energy) <= cfg.energy_tol;
        const bool last = side + cfg.side_step > cfg.max_side;
        prev = std::move(cur);
        if ((contained && steady) || last)
        {
            prev->stabilized = contained && steady;
            break;
        }
    }
    MinimizeOutcome out = std::move(*prev);
    out.sides_tried = std::move(sides);
    out.sup_norms = std::move(sups);
    out.side_energies = std::move(energies);
    const bool residual_ok = out.converged;
    out.converged = residual_ok && out.stabilized;
    if (!out.stabilized)
    {
        out.diagnostic = "max side " + std::to_string(cfg.max_side) + " reached without stabilization";
        if (out.boundary_mass > cfg.boundary_tol * cfg.m)
            out.diagnostic += " (boundary mass " + std::to_string(out.boundary_mass / cfg.m) +
                              " of m: spreading behaviour)";
    }
    else if (!residual_ok)
    {
        out.diagnostic = "box stabilized but residual above tolerance";
    }
    return out;
}

EnergyCurve energy_curve(const SolveConfig& cfg, const Nonlinearity& nl, const std::vector<double>& m_values)
{
    cfg.validate();
    for (std::size_t i = 0; i < m_values.size(); ++i)
    {
        if (!(m_values[i] > 0.0) || !std::isfinite(m_values[i]))
            throw UsageError("curve masses must be positive");
        if (i > 0 && !(m_values[i] > m_values[i - 1]))
            throw UsageError("curve masses must be strictly increasing");
    }
    certify(nl, cfg.dim, cfg.mode);
    EnergyCurve curve;
    curve.points = parallel_map<CurvePoint>(m_values.size(), cfg.workers, [&](std::size_t i) {
        SolveConfig point = cfg;
        point.m = m_values[i];
        CurvePoint p;
        p.m = point.m;
        try
        {
            const auto r = minimize_adaptive(point, nl);
            p.energy = r.energy;
            p.converged = r.converged;
            p.box_side = r.box_side;
            p.lattice_energy = r.lattice_energy;
            p.multiplier = r.multiplier;
            p.residual = r.residual;
            p.diagnostic = r.diagnostic;
        }
        catch (const std::exception& ex)
        {
            p.energy = std::numeric_limits<double>::quiet_NaN();
            p.diagnostic = ex.what();
        }
        return p;
    });
    return curve;
}

} // namespace dnls
