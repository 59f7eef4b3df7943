// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dnls/analysis.hpp"
#include "dnls/constants.hpp"
#include "dnls/rearrange.hpp"
#include "dnls/solver.hpp"
#include "dnls/test_functions.hpp"
#include "dnls/threshold.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace dnls;

namespace
{
struct Verdict
{
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok)
        {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Criterion = std::function<void(Verdict&)>;

bool run_criterion(int id, const std::string& title, double limit_seconds, const Criterion& body)
{
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try
    {
        body(v);
    }
    catch (const std::exception& e)
    {
        v.pass = false;
        v.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > limit_seconds)
        v.require(false, "runtime " + std::to_string(secs) + " s over the " + std::to_string(limit_seconds) +
                             " s limit");
    std::printf("%s criterion %d (%s): %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", id, title.c_str(),
                v.detail.str().c_str(), secs);
    std::fflush(stdout);
    return v.pass;
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "dnls-acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<double> sorted_values(const Field& u)
{
    std::vector<double> v;
    for (double x : u.values())
        if (x != 0.0)
            v.push_back(x);
    std::sort(v.begin(), v.end());
    return v;
}

/// sup F(t)/t^2 over a grid of (0, t_max].
double quadratic_bound(const Nonlinearity& nl, double t_max)
{
    double c = 0.0;
    for (int k = 1; k <= 2000; ++k)
    {
        const double t = t_max * k / 2000.0;
        c = std::max(c, oracle::primitive(nl, t) / (t * t));
    }
    return c;
}

/// Residual of -Lap u - f(u) = lambda u, assembled from the oracle Laplacian.
double oracle_residual(const Field& u, const Nonlinearity& nl)
{
    std::vector<double> g(u.size());
    double gu = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
    {
        g[i] = -oracle::laplacian_at(u, u.box().coord_of(i)) - nl.value(u[i]);
        gu += g[i] * u[i];
    }
    const double lambda = gu / oracle::sum_sq(u);
    double r = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        r += (g[i] - lambda * u[i]) * (g[i] - lambda * u[i]);
    return std::sqrt(r);
}

//---------------------------------------------------------------------------//

void structural_identities(Verdict& v)
{
    double worst_edge = 0.0, worst_parts = 0.0, worst_lap = 0.0;
    int fields = 0;
    for (int dim : {1, 2, 3})
        for (std::uint64_t seed = 0; seed < 100; ++seed)
        {
            const Field u = oracle::random_field(dim, 21, 1000 * dim + seed, -1.0, 1.0);
            const Field w = oracle::random_field(dim, 21, 5000 + 1000 * dim + seed, -1.0, 1.0);
            const double d = oracle::dirichlet(u);
            // Edge-sum identity: the site sum of |grad u|^2 over the box and its halo is the edge sum.
            const Field wide = u.resized(23);
            long double halo = 0.0L;
            oracle::for_each_site(dim, 11, [&](const Coord& x) { halo += grad_norm_sq_at(wide, x); });
            worst_edge = std::max(worst_edge, std::abs(static_cast<double>(halo) - d) / d);
            worst_edge = std::max(worst_edge, std::abs(dirichlet_energy(u) - d) / d);
            // Summation by parts against the polarised edge form.
            Field sum = u, diff = u;
            for (std::size_t i = 0; i < u.size(); ++i)
            {
                sum[i] += w[i];
                diff[i] -= w[i];
            }
            const double edge_form = 0.25 * (oracle::dirichlet(sum) - oracle::dirichlet(diff));
            const double lap_form = -inner(laplacian(u), w);
            worst_parts = std::max(worst_parts, std::abs(lap_form - edge_form) / std::max(1.0, std::abs(edge_form)));
            worst_lap = std::max(worst_lap, std::abs(-inner(laplacian(u), u) - d) / d);
            ++fields;
        }
    v.detail << fields << " fields, worst relative errors: edge sum " << worst_edge << ", summation by parts "
             << worst_parts << ", <-Lap u,u> vs D " << worst_lap;
    v.require(worst_edge <= 1e-12, "edge-sum identity");
    v.require(worst_parts <= 1e-12 && worst_lap <= 1e-12, "summation by parts");
}

void hand_energies(Verdict& v)
{
    struct Case
    {
        int dim;
        double zeta, m;
        int n;
    };
    const auto nl = Nonlinearity::power(4.0);
    for (const Case& c : {Case{2, 1.0, 1.0, 4}, Case{3, 2.0, 1.0, 5}})
    {
        const auto box = make_box(c.dim, c.n + 3 - (c.n % 2));
        const double delta = energy(make_test_function(DeltaKind{c.zeta}, box), nl);
        const double delta_hand = c.dim * c.zeta * c.zeta - std::pow(c.zeta, 4.0) / 4.0;
        const double kinetic = 0.5 * dirichlet_energy(make_test_function(BoxKind{c.m, c.n}, box));
        const double kinetic_hand = c.dim * c.m / c.n;
        v.detail << "N=" << c.dim << ": I(zeta delta)=" << delta << " vs " << delta_hand << ", kinetic(w_n)="
                 << kinetic << " vs " << kinetic_hand << "; ";
        v.require(std::abs(delta - delta_hand) <= 1e-12 * std::max(1.0, std::abs(delta_hand)), "I(zeta delta)");
        v.require(std::abs(kinetic - kinetic_hand) <= 1e-12 * kinetic_hand, "kinetic(w_n)");
    }
    CheckContext ctx;
    ctx.out_dir = scratch("hand");
    const auto rep = check_hand_energies(ctx);
    v.detail << "report: " << rep.message;
    v.require(rep.status == CheckStatus::Pass, "hand_energies report status");
    v.require(rep.message.find("2N zeta^2") != std::string::npos, "discrepancy surfaced in the report");
}

void rearrangement(Verdict& v)
{
    int equi = 0, idem = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed)
    {
        const int dim = 1 + static_cast<int>(seed % 3);
        const int side = dim == 1 ? 65 : dim == 2 ? 15 : 7;
        const Field u = oracle::random_field(dim, side, 90000 + seed, 0.0, 1.0, 0.1 + 0.8 * ((seed * 7) % 10) / 10.0);
        const Field r = schwarz_rearrange(u, OrderingStrategy::L1ShellLex);
        equi += sorted_values(r) == sorted_values(u);
        const Field rr = schwarz_rearrange(r, OrderingStrategy::L1ShellLex);
        idem += rr.side() == r.side() && std::equal(rr.values().begin(), rr.values().end(), r.values().begin());
    }
    // Sides must be odd, so the 1-D runs use 65 sites.
    int ps1 = 0, ps2 = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed)
    {
        const Field u1 = oracle::random_field(1, 65, 200000 + seed, 0.0, 1.0, 0.5);
        ps1 += oracle::dirichlet(schwarz_rearrange(u1, OrderingStrategy::L1ShellLex)) >
               oracle::dirichlet(u1) * (1.0 + 1e-12);
        const Field u2 = oracle::random_field(2, 15, 300000 + seed, 0.0, 1.0, 0.5);
        ps2 += oracle::dirichlet(schwarz_rearrange(u2, OrderingStrategy::L1ShellLex)) >
               oracle::dirichlet(u2) * (1.0 + 1e-12);
    }
    CheckContext ctx;
    ctx.out_dir = scratch("rearrange");
    const auto rep = check_rearrangement(ctx);
    std::size_t reproducers = 0;
    for (const auto& rel : rep.reproducers)
        reproducers += fs::exists(ctx.out_dir / rel);
    v.detail << "equimeasurable " << equi << "/1000, idempotent " << idem << "/1000, N=1 Polya-Szego violations "
             << ps1 << "/1000, N=2 violation rate " << ps2 / 1000.0 << " (measured); suite report lists "
             << rep.reproducers.size() << " reproducers, " << reproducers << " on disk";
    v.require(equi == 1000, "equimeasurability");
    v.require(idem == 1000, "idempotence");
    v.require(ps1 == 0, "N=1 Polya-Szego");
    v.require(reproducers == rep.reproducers.size(), "reproducer files");
}

void gradient_oracle(Verdict& v)
{
    const std::vector<Nonlinearity> families{Nonlinearity::power(3.0), Nonlinearity::two_power_sum(3.0, 5.0),
                                             Nonlinearity::two_power_diff(3.0, 5.0),
                                             Nonlinearity::log_power(3.0, 4.0), Nonlinearity::exp_saturating()};
    double worst = 0.0;
    for (int k = 0; k < 50; ++k)
    {
        const auto& nl = families[k % families.size()];
        const int dim = 1 + k % 3;
        const int side = dim == 1 ? 11 : dim == 2 ? 5 : 3;
        const Field u = oracle::random_field(dim, side, 400000 + k, -1.5, 1.5);
        const Field g = euclidean_gradient(u, nl);
        const auto fd = oracle::fd_energy_gradient(u, nl, 1e-5);
        for (std::size_t i = 0; i < u.size(); ++i)
            worst = std::max(worst, oracle::relative(g[i], fd[i]));
    }
    v.detail << "50 fields, 5 families, worst relative deviation " << worst;
    v.require(worst <= 1e-6, "finite-difference agreement");
}

void subcritical(Verdict& v)
{
    SolveConfig cfg;
    cfg.side = 41;
    const auto nl = Nonlinearity::power(3.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double m : {0.5, 1.0, 2.0})
    {
        cfg.m = m;
        const auto r = minimize_on_box(cfg, nl, make_box(2, 41));
        const Field& u = r.minimizer;
        const double mass_err = std::abs(oracle::sum_sq(u) - m) / m;
        const double residual = oracle_residual(u, nl) / std::max(1.0, std::sqrt(m));
        const double defect = schwarz_defect(u, OrderingStrategy::L1ShellLex);
        const double lowest = *std::min_element(u.values().begin(), u.values().end());
        v.detail << "m=" << m << ": E=" << r.energy << " residual=" << residual << " min=" << lowest
                 << " schwarz defect=" << defect << " mass err=" << mass_err << "; ";
        v.require(r.energy < -1e-4, "E < -1e-4 at m=" + std::to_string(m));
        v.require(r.energy < prev, "strict decrease at m=" + std::to_string(m));
        v.require(residual <= 1e-8, "residual at m=" + std::to_string(m));
        v.require(lowest >= 0.0, "nonnegativity at m=" + std::to_string(m));
        v.require(defect <= 1e-8, "Schwarz symmetry at m=" + std::to_string(m));
        v.require(mass_err <= 1e-12, "mass at m=" + std::to_string(m));
        prev = r.energy;
    }
}

void supercritical(Verdict& v)
{
    const auto nl = Nonlinearity::power(6.0);
    SolveConfig cfg;
    cfg.side = 21;
    cfg.max_side = 61;
    ThresholdConfig t;
    t.with_formula = false;
    const auto thr = estimate_threshold(cfg, nl, t);
    v.require(thr.status == ThresholdStatus::Bracketed, "threshold bracket");
    const double ms = thr.estimate;
    v.detail << "m* estimate " << ms << "; ";

    cfg.m = 0.5 * ms;
    const auto below = minimize_on_box(cfg, nl, make_box(2, 41));
    cfg.m = 2.0 * ms;
    const auto above = minimize_on_box(cfg, nl, make_box(2, 41));
    v.detail << "E(0.5 m*)=" << below.energy << ", E(2 m*)=" << above.energy << "; sup norms at 0.5 m*:";
    v.require(below.energy >= -1e-6, "E >= -1e-6 below the threshold");
    v.require(above.energy < -1e-4, "E < -1e-4 above the threshold");

    cfg.m = 0.5 * ms;
    double prev = std::numeric_limits<double>::infinity();
    for (int side : {21, 41, 61})
    {
        const auto r = minimize_on_box(cfg, nl, make_box(2, side));
        const double sup = *std::max_element(r.minimizer.values().begin(), r.minimizer.values().end());
        v.detail << " side " << side << ": " << sup;
        v.require(sup < prev, "sup norm decreasing at side " + std::to_string(side));
        prev = sup;
    }
}

void weinstein(Verdict& v)
{
    const auto nl = Nonlinearity::power(4.0);
    SolveConfig cfg;
    cfg.side = 21;
    cfg.max_side = 61;
    ThresholdConfig t;
    t.with_formula = false;
    const auto thr = estimate_threshold(cfg, nl, t);
    QuotientConfig q;
    q.sides = {21};
    const auto j = j_constant(4.0, q);
    const double formula = oracle::weinstein(4.0, j.value);
    const double rel = std::abs(thr.estimate - formula) / formula;
    v.detail << "bisection m*=" << thr.estimate << " in [" << thr.m_lo << ", " << thr.m_hi << "], J=" << j.value
             << ", 2J=" << formula << ", relative gap " << rel;
    v.require(thr.status == ThresholdStatus::Bracketed, "bracket");
    v.require(j.value <= 4.0, "J <= 2N");
    v.require(rel < 0.05, "5% agreement");
}

void subadditivity(Verdict& v)
{
    const std::vector<double> grid{0.25, 0.5, 1.0};
    for (const auto& nl : {Nonlinearity::power(3.0), Nonlinearity::power(6.0)})
    {
        SolveConfig cfg;
        cfg.side = 41;
        std::map<double, double> e;
        for (double a : grid)
            for (double b : grid)
                for (double m : {a, b, a + b})
                    if (!e.count(m))
                    {
                        cfg.m = m;
                        e[m] = minimize_on_box(cfg, nl, make_box(2, 41)).energy;
                    }
        double worst_gap = -std::numeric_limits<double>::infinity();
        for (double a : grid)
            for (double b : grid)
                worst_gap = std::max(worst_gap, e[a + b] - e[a] - e[b]);
        const double c = quadratic_bound(nl, std::sqrt(e.rbegin()->first));
        bool bounded = true;
        for (const auto& [m, en] : e)
            bounded = bounded && en <= 1e-6 && en >= -c * m;
        v.detail << nl.describe() << ": max E_{a+b}-E_a-E_b = " << worst_gap << ", C=" << c << ", energies in [-Cm, 1e-6]: "
                 << (bounded ? "yes" : "no") << "; ";
        v.require(worst_gap <= 1e-6, "subadditivity for " + nl.describe());
        v.require(bounded, "boundedness for " + nl.describe());
    }
}

void gagliardo_nirenberg(Verdict& v)
{
    QuotientConfig q;
    q.sides = {21};
    const auto j = j_constant(4.0, q);
    const double c = 1.0 / j.value;
    int violations = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed)
    {
        const int side = 5 + 2 * static_cast<int>(seed % 9);
        const Field u = oracle::random_field(2, side, 500000 + seed, -1.0, 1.0, 0.05 + 0.95 * (seed % 4) / 3.0);
        if (oracle::sum_sq(u) == 0.0)
            continue;
        const double lhs = oracle::sum_pow(u, 4.0);
        const double rhs = c * oracle::dirichlet(u) * oracle::sum_sq(u);
        worst = std::max(worst, lhs / rhs);
        violations += lhs > rhs * (1.0 + 1e-9);
    }
    v.detail << "N=2: J=" << j.value << ", " << violations << " violations, worst ratio " << worst;
    v.require(violations == 0, "GN at N=2");

    QuotientConfig q3;
    q3.dim = 3;
    q3.sides = {11};
    const auto s = minimize_quotient(Quotient::sobolev(3), q3);
    int sob_violations = 0;
    double sob_worst = 0.0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed)
    {
        const int side = 3 + 2 * static_cast<int>(seed % 5);
        const Field u = oracle::random_field(3, side, 600000 + seed, -1.0, 1.0, 0.05 + 0.95 * (seed % 4) / 3.0);
        if (oracle::sum_sq(u) == 0.0)
            continue;
        const double d = oracle::dirichlet(u);
        const double lhs = oracle::sum_pow(u, 6.0);
        const double rhs = d * d * d / s.value;
        sob_worst = std::max(sob_worst, lhs / rhs);
        sob_violations += lhs > rhs * (1.0 + 1e-9);
    }
    v.detail << "; N=3 Sobolev: S=" << s.value << ", " << sob_violations << " violations, worst ratio " << sob_worst;
    v.require(sob_violations == 0, "Sobolev at N=3");
}

int cli(const std::string& args)
{
    const std::string cmd = std::string("\"") + DNLS_CLI + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> result_files(const fs::path& dir)
{
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
    {
        if (!entry.is_regular_file())
            continue;
        const auto name = entry.path().filename().string();
        if (name == "manifest.json" || name == "run.log")
            continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        files[fs::relative(entry.path(), dir).string()] = ss.str();
    }
    return files;
}

void determinism(Verdict& v)
{
    const fs::path root = scratch("determinism");
    const std::string curve = "curve --dim 2 --family power --p 6 --m-grid 2,4,6,8 --side 21 --max-side 41 "
                              "--formats csv,json,svg --seed 42";
    const std::string verify = "verify --suite core --dim 2 --seed 42";
    for (const std::string w : {"1", "8"})
    {
        v.require(cli(curve + " --workers " + w + " --out-dir \"" + (root / ("curve" + w)).string() + "\"") == 0,
                  "curve exit status with " + w + " workers");
        v.require(cli(verify + " --workers " + w + " --out \"" + (root / ("verify" + w) / "report.json").string() +
                      "\"") == 0,
                  "verify exit status with " + w + " workers");
    }
    for (const std::string sub : {"curve", "verify"})
    {
        const auto a = result_files(root / (sub + "1"));
        const auto b = result_files(root / (sub + "8"));
        v.detail << sub << ": " << a.size() << " files compared; ";
        v.require(!a.empty() && a == b, sub + " outputs differ between 1 and 8 workers");
    }
}

} // namespace

int main()
{
    bool ok = true;
    ok &= run_criterion(1, "structural identities", 5, structural_identities);
    ok &= run_criterion(2, "hand-computed energies", 1, hand_energies);
    ok &= run_criterion(3, "rearrangement", 30, rearrangement);
    ok &= run_criterion(4, "gradient oracle", 30, gradient_oracle);
    ok &= run_criterion(5, "subcritical Power(3), N=2", 180, subcritical);
    ok &= run_criterion(6, "supercritical dichotomy Power(6), N=2", 300, supercritical);
    ok &= run_criterion(7, "Weinstein cross-check Power(4), N=2", 300, weinstein);
    ok &= run_criterion(8, "subadditivity and boundedness", 300, subadditivity);
    ok &= run_criterion(9, "Gagliardo-Nirenberg and Sobolev", 60, gagliardo_nirenberg);
    ok &= run_criterion(10, "determinism across worker counts", 600, determinism);
    return ok ? 0 : 1;
}
