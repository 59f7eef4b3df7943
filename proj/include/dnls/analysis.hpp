#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnls/io.hpp"
#include "dnls/solver.hpp"
#include "dnls/test_functions.hpp"
#include "dnls/threshold.hpp"

namespace dnls
{
enum class CheckStatus
{
    Pass,
    Fail,
    Measured, // trend or rate reported, nothing asserted
    Skipped,
};

std::string_view to_string(CheckStatus s);

struct CheckReport
{
    std::string name;
    std::string claim;
    Json parameters = Json::object();
    CheckStatus status = CheckStatus::Pass;
    Json witnesses = Json::object();
    /// Paths relative to the output directory.
    std::vector<std::string> reproducers;
    std::string message;
    /// Wall time; kept out of the report JSON so reports stay byte-stable.
    double runtime_seconds = 0.0;
};

Json check_to_json(const CheckReport& r);

struct CheckContext
{
    /// Reproducers go to out_dir/reproducers, rearrangement violations to
    /// out_dir/violations. Empty means a directory under the system temp dir.
    std::filesystem::path out_dir;
    SolveConfig solve;           // dim, seed, workers and solver knobs
    ThresholdConfig threshold;   // bands and search range
    QuotientConfig quotient;
    double residual_tol = 1e-8;  // certificate: residual / max(1, ||u||_2)
    double schwarz_tol = 1e-8;   // certificate: ||u - Ru||_inf
    double mass_tol = 1e-12;     // certificate: relative mass error
    int threshold_side = 21;     // starting box for threshold searches

    CheckContext();
    std::filesystem::path resolved_out_dir() const;
};

/// Energy estimate on the context's box: the box minimiser or the spreading bound.
MinimizeOutcome estimate_energy(const CheckContext& ctx, const Nonlinearity& nl, double m);

// Lattice and rearrangement identities.
CheckReport check_structural_identities(const CheckContext& ctx, int fields_per_dim = 100, int side = 21);
CheckReport check_hand_energies(const CheckContext& ctx);
CheckReport check_rearrangement(const CheckContext& ctx, int fields = 1000, int side_1d = 65, int side_2d = 15);
CheckReport check_gradient_oracle(const CheckContext& ctx, int fields = 50);

// Energy-curve clauses.
CheckReport check_boundedness(const CheckContext& ctx, const Nonlinearity& nl, const std::vector<double>& m_values);
CheckReport check_subadditivity(const CheckContext& ctx, const Nonlinearity& nl, const std::vector<double>& grid);
CheckReport check_monotonicity_continuity(const CheckContext& ctx, const Nonlinearity& nl,
                                          const std::vector<double>& m_grid);

// Threshold and minimiser clauses.
CheckReport check_threshold_classification(const CheckContext& ctx, int dim);
CheckReport check_minimizer_certificates(const CheckContext& ctx, const Nonlinearity& nl, double m);
/// Below `m_star` the sign band is asserted and the sup-norm trend measured;
/// at or above it the same measurement serves as the localised contrast run.
CheckReport check_nonachievement(const CheckContext& ctx, const Nonlinearity& nl, double m, double m_star,
                                 const std::vector<int>& sides = {21, 41, 61});
CheckReport check_gagliardo_nirenberg(const CheckContext& ctx, int dim, int samples = 1000);

enum class Suite
{
    Core,
    Thresholds,
    Certificates,
    All,
};

std::string_view to_string(Suite s);
Suite suite_from_string(std::string_view name);

/// Runs a suite on ctx.solve.workers threads. Check failures never abort the
/// suite; the order of the returned reports is fixed.
std::vector<CheckReport> run_suite(const CheckContext& ctx, Suite suite);

bool any_failed(const std::vector<CheckReport>& reports);

} // namespace dnls
