#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/nonlinearity.hpp"
#include "dnls/rearrange.hpp"

namespace dnls
{
enum class Initializer
{
    BoxProfile,
    Delta,
    Gaussian,
    SymmetrizedRandom,
};

std::string_view to_string(Initializer i);
Initializer initializer_from_string(std::string_view name);

struct SolveConfig
{
    int dim = 2;
    double m = 1.0;
    int side = 21;
    int max_side = 61;
    int side_step = 10;

    // Step-size policy.
    double initial_step = 0.1;
    double backtrack = 0.5;
    bool barzilai_borwein = true;
    double min_step = 1e-6;
    double max_step = 10.0;

    // Tolerances.
    double energy_tol = 1e-6;   // |E(side) - E(previous side)| for box growth
    double residual_tol = 1e-10; // Euler-Lagrange residual / max(1, ||u||_2)
    double boundary_tol = 1e-8; // boundary-shell mass / m
    double descent_tol = 1e-12; // allowed energy rise of an accepted step
    int max_iterations = 20000;

    std::vector<Initializer> initializers{Initializer::BoxProfile, Initializer::Delta, Initializer::Gaussian,
                                          Initializer::SymmetrizedRandom};
    int symmetrize_every = 50; // 0 disables the guarded rearrangement
    OrderingStrategy ordering = OrderingStrategy::L1ShellLex;
    TheoremMode mode = TheoremMode::Auto;
    std::uint64_t seed = 42;
    unsigned workers = 0; // sweeps only; 0 = hardware concurrency

    /// Throws UsageError on any invalid field.
    void validate() const;
};

struct MinimizeOutcome
{
    explicit MinimizeOutcome(Field u) : minimizer(std::move(u)) {}

    Field minimizer;
    /// Energy estimate: the box minimiser's energy or the spreading bound, whichever is lower.
    double energy = 0.0;
    /// I(minimizer) on the box.
    double lattice_energy = 0.0;
    bool spreading_bound_used = false;
    double multiplier = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;  // Euler-Lagrange residual below tolerance
    bool stabilized = false; // adaptive runs: box growth criteria met
    double boundary_mass = 0.0;
    int box_side = 0;
    std::string initializer;
    std::vector<int> sides_tried;
    std::vector<double> sup_norms; // ||u||_inf per tried side
    std::vector<double> side_energies;
    std::string diagnostic;
};

/// I(u) = D(u)/2 - sum F(u).
double energy(const Field& u, const Nonlinearity& nl);

/// x -> (-Delta u)(x) - f(u(x)).
Field euclidean_gradient(const Field& u, const Nonlinearity& nl);

/// Lagrange multiplier <grad, u>/m and the residual ||grad - lambda u||_2.
struct Multiplier
{
    double lambda = 0.0;
    double residual = 0.0;
};
Multiplier lagrange_multiplier(const Field& u, const Nonlinearity& nl);

/// I(w_n) for the block profile on the infinite lattice, in closed form:
/// N m / n - n^N F(sqrt(m) n^{-N/2}).
double block_energy(const Nonlinearity& nl, int dim, double m, double n);

/// Minimum of block_energy over n = 2^k, k = 0..40. An upper bound on E_m
/// that tracks the spreading regime, where box minimisers carry a positive bias.
struct SpreadingBound
{
    double energy = 0.0;
    double n = 1.0;
};
SpreadingBound spreading_energy_bound(const Nonlinearity& nl, int dim, double m);

/// Multistart projected gradient descent on a fixed box.
MinimizeOutcome minimize_on_box(const SolveConfig& cfg, const Nonlinearity& nl, const BoxPtr& box,
                                const std::optional<Field>& warm_start = std::nullopt);

/// Solves on sides cfg.side, cfg.side + cfg.side_step, ... up to cfg.max_side,
/// warm-starting each box from the previous minimiser.
MinimizeOutcome minimize_adaptive(const SolveConfig& cfg, const Nonlinearity& nl);

struct CurvePoint
{
    double m = 0.0;
    double energy = 0.0;
    bool converged = false;
    int box_side = 0;
    double lattice_energy = 0.0;
    double multiplier = 0.0;
    double residual = 0.0;
    std::string diagnostic;
};

struct EnergyCurve
{
    std::vector<CurvePoint> points;
};

/// Independent minimize_adaptive per mass, run on cfg.workers threads.
EnergyCurve energy_curve(const SolveConfig& cfg, const Nonlinearity& nl, const std::vector<double>& m_values);

} // namespace dnls
