#include "dnls/constants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "dnls/errors.hpp"
#include "dnls/parallel.hpp"
#include "dnls/summation.hpp"
#include "dnls/test_functions.hpp"

namespace dnls
{
Quotient Quotient::weinstein(double p)
{
    if (!(p > 2.0) || !std::isfinite(p))
        throw UsageError("J^{p,N} needs p > 2");
    return {p - 2.0, 1.0, p};
}

Quotient Quotient::sobolev(int dim)
{
    if (dim < 3)
        throw UsageError("the lattice Sobolev inequality needs dim >= 3");
    const double pstar = 2.0 * dim / (dim - 2.0);
    return {0.0, pstar / 2.0, pstar};
}

double Quotient::evaluate(const Field& u) const
{
    const double l2 = std::sqrt(mass(u));
    const double lp = norm_lp(u, p);
    if (!(lp > 0.0))
        throw UsageError("quotient of the zero field is undefined");
    // Ratios first so that wide dynamic ranges do not overflow.
    return std::pow(l2 / lp, a) * std::pow(dirichlet_energy(u) / (lp * lp), b);
}

namespace
{
struct QuotientTerms
{
    double log_q = 0.0;
    double d = 0.0;
    double pp = 0.0;
};

QuotientTerms terms(const Quotient& q, const Field& u)
{
    CompensatedSum pp;
    for (double v : u.values())
        pp += std::pow(std::abs(v), q.p);
    QuotientTerms t;
    t.d = dirichlet_energy(u);
    t.pp = pp.value();
    t.log_q = 0.5 * q.a * std::log(mass(u)) + q.b * std::log(t.d) - std::log(t.pp);
    return t;
}

// Tangential gradient of log Q on the unit sphere.
Field log_gradient(const Quotient& q, const Field& u, const QuotientTerms& t)
{
    Field g = laplacian(u);
    for (std::size_t i = 0; i < g.size(); ++i)
    {
        const double v = u[i];
        g[i] = q.a * v - 2.0 * q.b * g[i] / t.d - q.p * std::pow(std::abs(v), q.p - 2.0) * v / t.pp;
    }
    const double radial = inner(g, u);
    for (std::size_t i = 0; i < g.size(); ++i)
        g[i] -= radial * u[i];
    return g;
}

void to_unit_sphere(Field& u)
{
    for (auto& v : u.values())
        v = std::abs(v);
    u *= 1.0 / std::sqrt(mass(u));
}

struct QuotientRun
{
    Field u;
    double log_q = 0.0;
    bool converged = false;
};

QuotientRun descend_quotient(const Quotient& q, Field u, const QuotientConfig& cfg)
{
    to_unit_sphere(u);
    auto t = terms(q, u);
    std::optional<Field> prev_u, prev_g;
    double tau = 1e-2;
    bool converged = false;
    for (int it = 0; it < cfg.max_iterations; ++it)
    {
        Field g = log_gradient(q, u, t);
        if (std::sqrt(mass(g)) <= cfg.gradient_tol)
        {
            converged = true;
            break;
        }
        if (prev_u)
        {
            CompensatedSum ss, sy;
            for (std::size_t i = 0; i < u.size(); ++i)
            {
                const double s = u[i] - (*prev_u)[i];
                const double y = g[i] - (*prev_g)[i];
                ss += s * s;
                sy += s * y;
            }
            tau = sy.value() > 0.0 ? ss.value() / sy.value() : 1e-2;
        }
        tau = std::clamp(tau, 1e-8, 1e2);
        bool accepted = false;
        Field v(u.box_ptr());
        QuotientTerms tv;
        while (tau > 1e-16)
        {
            v = u;
            for (std::size_t i = 0; i < v.size(); ++i)
                v[i] -= tau * g[i];
            to_unit_sphere(v);
            tv = terms(q, v);
            if (tv.log_q <= t.log_q + 1e-14)
            {
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if (!accepted)
            break;
        prev_u = std::move(u);
        prev_g = std::move(g);
        u = std::move(v);
        t = tv;
    }
    return {std::move(u), t.log_q, converged};
}

std::vector<Field> quotient_starts(const BoxPtr& box)
{
    const int side = box->side();
    std::vector<Field> starts;
    starts.push_back(make_test_function(DeltaKind{1.0}, box));
    Field halo = make_test_function(DeltaKind{1.0}, box);
    const auto centre = box->index_of(Coord(static_cast<std::size_t>(box->dim()), 0));
    for (int k = 0; k < 2 * box->dim(); ++k)
        halo[static_cast<std::size_t>(box->neighbor(centre, k))] = 0.3;
    starts.push_back(halo);
    for (double sigma : {1.0, 2.0, side / 6.0})
        starts.push_back(make_test_function(GaussianKind{1.0, sigma}, box));
    starts.push_back(make_test_function(BoxKind{1.0, std::max(1, side / 3)}, box));
    return starts;
}

} // namespace

QuotientResult minimize_quotient(const Quotient& q, const QuotientConfig& cfg)
{
    if (cfg.sides.empty())
        throw UsageError("quotient minimisation needs at least one box side");
    QuotientResult out(Field::zeros(cfg.dim, cfg.sides.back()));
    for (int side : cfg.sides)
    {
        const auto box = make_box(cfg.dim, side);
        const auto starts = quotient_starts(box);
        auto runs = parallel_map<QuotientRun>(starts.size(), cfg.workers, [&](std::size_t k) {
            return descend_quotient(q, starts[k], cfg);
        });
        std::size_t best = 0;
        for (std::size_t k = 1; k < runs.size(); ++k)
            if (runs[k].log_q < runs[best].log_q)
                best = k;
        out.per_side.push_back(q.evaluate(runs[best].u));
        out.starts += static_cast<int>(runs.size());
        if (side == cfg.sides.back())
        {
            out.minimizer = runs[best].u;
            out.value = out.per_side.back();
            out.side = side;
            out.converged = runs[best].converged;
        }
    }
    out.delta_value = q.evaluate(make_test_function(DeltaKind{1.0}, make_box(cfg.dim, 3)));
    return out;
}

QuotientResult j_constant(double p, const QuotientConfig& cfg)
{
    return minimize_quotient(Quotient::weinstein(p), cfg);
}

Field random_sparse_field(int dim, int side, double density, std::uint64_t seed, bool nonnegative)
{
    Field u(make_box(dim, side));
    std::uint64_t state = seed;
    bool any = false;
    for (auto& v : u.values())
    {
        state = splitmix64(state);
        if (unit_double(state) >= density)
            continue;
        state = splitmix64(state);
        const double r = unit_double(state);
        v = nonnegative ? r : 2.0 * r - 1.0;
        any = any || v != 0.0;
    }
    if (!any)
        u[u.size() / 2] = 1.0;
    return u;
}

namespace
{
InequalityCheck sample_inequality(double constant, int samples, int dim, int side, std::uint64_t seed,
                                  const std::function<double(const Field&)>& lhs,
                                  const std::function<double(const Field&)>& rhs)
{
    static constexpr double densities[] = {0.02, 0.1, 0.5, 1.0};
    InequalityCheck c;
    c.constant = constant;
    c.samples = samples;
    for (int i = 0; i < samples; ++i)
    {
        const auto s = point_seed(seed, constant, static_cast<std::uint64_t>(i));
        const Field u = random_sparse_field(dim, side, densities[i % 4], s);
        const double l = lhs(u);
        const double r = constant * rhs(u);
        c.worst_ratio = std::max(c.worst_ratio, l / r);
        if (l > r * (1.0 + 1e-9))
        {
            ++c.violations;
            if (c.counterexamples.size() < 10)
                c.counterexamples.push_back(u);
        }
    }
    return c;
}

} // namespace

ConstantsReport gn_verify(int dim, int samples, int sample_side, std::uint64_t seed, const QuotientConfig& cfg)
{
    if (dim < 2)
        throw UsageError("gn_verify needs dim >= 2");
    if (samples < 1)
        throw UsageError("gn_verify needs at least one sample");
    QuotientConfig qc = cfg;
    qc.dim = dim;
    const double p = 2.0 + 4.0 / dim;
    ConstantsReport rep(dim, p, j_constant(p, qc));
    rep.gn_constant = 1.0 / rep.j.value;
    rep.sample_side = sample_side;

    const double l2_power = 4.0 / dim;
    rep.gn = sample_inequality(
        rep.gn_constant, samples, dim, sample_side, seed,
        [p](const Field& u) { return std::pow(norm_lp(u, p), p); },
        [l2_power](const Field& u) { return dirichlet_energy(u) * std::pow(mass(u), 0.5 * l2_power); });

    // Block profiles of unit mass on the infinite lattice, closed form.
    for (int n = 1; n <= 64; n *= 2)
    {
        const double vol = std::pow(static_cast<double>(n), dim);
        const double lhs = vol * std::pow(std::sqrt(1.0 / vol), p);
        const double rhs = rep.gn_constant * 2.0 * dim / n;
        rep.block_slack.push_back({n, lhs, rhs});
    }

    if (dim >= 3)
    {
        const auto q = Quotient::sobolev(dim);
        rep.sobolev = minimize_quotient(q, qc);
        rep.sobolev_constant = 1.0 / rep.sobolev->value;
        rep.sobolev_check = sample_inequality(
            *rep.sobolev_constant, samples, dim, sample_side, splitmix64(seed),
            [q](const Field& u) { return std::pow(norm_lp(u, q.p), q.p); },
            [q](const Field& u) { return std::pow(dirichlet_energy(u), q.b); });
    }
    return rep;
}

} // namespace dnls
