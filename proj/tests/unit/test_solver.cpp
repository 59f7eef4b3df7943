#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dnls/errors.hpp"
#include "dnls/solver.hpp"
#include "dnls/test_functions.hpp"
#include "oracles.hpp"

using namespace dnls;

TEST_CASE("energy matches the oracle")
{
    for (const auto& nl : {Nonlinearity::power(3.0), Nonlinearity::log_power(3.0, 4.0),
                           Nonlinearity::exp_saturating()})
    {
        const Field u = oracle::random_field(2, 7, 13, -1.0, 1.0);
        CHECK(energy(u, nl) == doctest::Approx(oracle::energy(u, nl)).epsilon(1e-12));
    }
}

TEST_CASE("I(zeta delta) = N zeta^2 - F(zeta)")
{
    const auto nl = Nonlinearity::power(4.0);
    for (int dim : {1, 2, 3})
    {
        const double zeta = 1.5;
        const Field d = make_test_function(DeltaKind{zeta}, make_box(dim, 3));
        CHECK(energy(d, nl) == doctest::Approx(dim * zeta * zeta - std::pow(zeta, 4.0) / 4.0).epsilon(1e-14));
    }
}

TEST_CASE("gradient agrees with finite differences of the oracle energy")
{
    const std::vector<Nonlinearity> families{Nonlinearity::power(3.0), Nonlinearity::two_power_sum(3.0, 5.0),
                                             Nonlinearity::two_power_diff(3.0, 5.0),
                                             Nonlinearity::log_power(3.0, 4.0), Nonlinearity::exp_saturating()};
    for (const auto& nl : families)
    {
        INFO(nl.describe());
        const Field u = oracle::random_field(2, 5, 17, -1.0, 1.0);
        const Field g = euclidean_gradient(u, nl);
        const auto fd = oracle::fd_gradient(u, [&](const Field& w) { return oracle::energy(w, nl); }, 1e-5);
        for (std::size_t i = 0; i < u.size(); ++i)
            CHECK(oracle::relative(g[i], fd[i]) < 1e-6);
    }
}

TEST_CASE("multiplier of an exact eigenfunction")
{
    // With f = 0 the constrained critical points are Laplacian eigenvectors;
    // on a 1-D box of side 3 the vector (1, sqrt2, 1) has -Lap u = (2 - sqrt2) u.
    // Power(40) is numerically zero at these amplitudes.
    Field u = Field::zeros(1, 3);
    u[0] = 1e-3;
    u[1] = std::sqrt(2.0) * 1e-3;
    u[2] = 1e-3;
    const auto mult = lagrange_multiplier(u, Nonlinearity::power(40.0));
    CHECK(mult.lambda == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
    CHECK(mult.residual < 1e-15);
}

TEST_CASE("block energy closed form")
{
    const auto nl = Nonlinearity::power(6.0);
    const double m = 2.0;
    const int n = 4;
    const double a = std::sqrt(m) / n;
    CHECK(block_energy(nl, 2, m, n) == doctest::Approx(2.0 * m / n - n * n * std::pow(a, 6.0) / 6.0));
    // The block profile on a finite box has exactly the closed-form energy.
    const Field w = make_test_function(BoxKind{m, n}, make_box(2, 7));
    CHECK(oracle::energy(w, nl) == doctest::Approx(block_energy(nl, 2, m, n)).epsilon(1e-13));
}

TEST_CASE("spreading bound is an achieved block energy")
{
    const auto nl = Nonlinearity::power(6.0);
    const auto b = spreading_energy_bound(nl, 2, 1.0);
    CHECK(b.energy == doctest::Approx(block_energy(nl, 2, 1.0, b.n)));
    CHECK(b.energy > 0.0);
    CHECK(b.energy < 1e-9);
}

TEST_CASE("config validation")
{
    SolveConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    auto bad = cfg;
    bad.side = 20;
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = cfg;
    bad.m = -1.0;
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = cfg;
    bad.backtrack = 1.0;
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = cfg;
    bad.initializers.clear();
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = cfg;
    bad.side_step = 3;
    CHECK_THROWS_AS(bad.validate(), UsageError);
    CHECK(initializer_from_string("gaussian") == Initializer::Gaussian);
    CHECK_THROWS_AS(initializer_from_string("uniform"), UsageError);
}

TEST_CASE("subcritical minimiser on a box")
{
    SolveConfig cfg;
    cfg.m = 2.0;
    const auto nl = Nonlinearity::power(3.0);
    const auto r = minimize_on_box(cfg, nl, make_box(2, 21));
    CHECK(r.converged);
    CHECK(r.energy < -1e-4);
    CHECK(r.residual < 1e-8);
    CHECK(oracle::sum_sq(r.minimizer) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(min_value(r.minimizer) >= 0.0);
    CHECK(r.lattice_energy == doctest::Approx(oracle::energy(r.minimizer, nl)).epsilon(1e-10));
    // Beats every named competitor of the same mass.
    const auto box = make_box(2, 21);
    for (int n : {1, 3, 5, 7})
        CHECK(r.lattice_energy <= oracle::energy(make_test_function(BoxKind{2.0, n}, box), nl));
}

TEST_CASE("adaptive solve with box growth")
{
    SolveConfig cfg;
    cfg.m = 6.0;
    const auto r = minimize_adaptive(cfg, Nonlinearity::power(6.0));
    CHECK(r.converged);
    CHECK(r.stabilized);
    CHECK(r.energy < -1.0);
    CHECK(r.sides_tried.front() == 21);
    CHECK(r.sides_tried.size() == r.sup_norms.size());
}

TEST_CASE("energy curve is independent of the worker count")
{
    SolveConfig cfg;
    cfg.side = 11;
    cfg.max_side = 21;
    const std::vector<double> masses{0.5, 1.0, 2.0};
    const auto nl = Nonlinearity::power(3.0);
    cfg.workers = 1;
    const auto a = energy_curve(cfg, nl, masses);
    cfg.workers = 3;
    const auto b = energy_curve(cfg, nl, masses);
    REQUIRE(a.points.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
    {
        CHECK(a.points[i].energy == b.points[i].energy);
        CHECK(a.points[i].box_side == b.points[i].box_side);
    }
    CHECK(a.points[0].energy > a.points[1].energy);
    CHECK(a.points[1].energy > a.points[2].energy);
    CHECK_THROWS_AS(energy_curve(cfg, nl, {1.0, 0.5}), UsageError);
    CHECK_THROWS_AS(energy_curve(cfg, nl, {0.0}), UsageError);
}
