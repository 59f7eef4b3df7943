#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dnls/lattice.hpp"

namespace dnls
{
/// Scale-invariant quotient ||u||_2^a D(u)^b / ||u||_p^p, with a + 2b = p.
struct Quotient
{
    double a = 0.0;
    double b = 1.0;
    double p = 4.0;

    /// J^{p,N}: ||u||_2^{p-2} D(u) / ||u||_p^p.
    static Quotient weinstein(double p);
    /// Sobolev: D(u)^{N/(N-2)} / ||u||_{2*}^{2*}, 2* = 2N/(N-2); needs N >= 3.
    static Quotient sobolev(int dim);

    double evaluate(const Field& u) const;
};

struct QuotientConfig
{
    int dim = 2;
    std::vector<int> sides{21};
    int max_iterations = 20000;
    double gradient_tol = 1e-10;
    unsigned workers = 0;
};

struct QuotientResult
{
    explicit QuotientResult(Field u) : minimizer(std::move(u)) {}

    Field minimizer;
    double value = 0.0;
    int side = 0;
    bool converged = false;
    /// Best value per entry of QuotientConfig::sides.
    std::vector<double> per_side;
    int starts = 0;
    /// Value of the quotient at the unit delta; an upper bound on the infimum.
    double delta_value = 0.0;
};

/// Multistart normalised gradient descent on the quotient over each box side;
/// the reported minimiser is the best one found on the largest side.
QuotientResult minimize_quotient(const Quotient& q, const QuotientConfig& cfg);

/// J^{p,N} estimate. Throws UsageError for p <= 2.
QuotientResult j_constant(double p, const QuotientConfig& cfg);

struct InequalityCheck
{
    double constant = 0.0; // C in lhs <= C (1 + 1e-9) rhs
    int samples = 0;
    int violations = 0;
    double worst_ratio = 0.0; // max lhs / (C rhs)
    std::vector<Field> counterexamples; // first few violating fields
};

struct BlockSlack
{
    int n = 0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct ConstantsReport
{
    ConstantsReport(int dim_, double p_, QuotientResult j_) : dim(dim_), p(p_), j(std::move(j_)) {}

    int dim = 2;
    double p = 4.0;
    QuotientResult j;
    double gn_constant = 0.0;
    InequalityCheck gn;
    std::vector<BlockSlack> block_slack;
    std::optional<QuotientResult> sobolev;
    std::optional<double> sobolev_constant;
    std::optional<InequalityCheck> sobolev_check;
    int sample_side = 21;
};

/// Gagliardo-Nirenberg check at p = 2 + 4/N with C = 1/J on `samples` seeded
/// random fields of side `sample_side`; for N >= 3 also the Sobolev inequality.
ConstantsReport gn_verify(int dim, int samples, int sample_side, std::uint64_t seed, const QuotientConfig& cfg);

/// Seeded random field with a fraction `density` of nonzero sites, values in [-1, 1].
Field random_sparse_field(int dim, int side, double density, std::uint64_t seed, bool nonnegative = false);

} // namespace dnls
