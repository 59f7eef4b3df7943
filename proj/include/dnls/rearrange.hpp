#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dnls/lattice.hpp"

namespace dnls
{
enum class OrderingStrategy
{
    L1ShellLex,   // l1 norm, then l_inf norm, then lexicographic
    LinfShellLex, // l_inf norm, then lexicographic
    Custom,
};

std::string_view to_string(OrderingStrategy s);
OrderingStrategy ordering_from_string(std::string_view name);

/// Enumeration of lattice sites along which a Schwarz rearrangement places
/// values in decreasing order. Position 0 is always the origin.
class SiteOrdering
{
public:
    /// First `count` sites of Z^dim under a geometric strategy.
    static SiteOrdering first_sites(OrderingStrategy strategy, int dim, std::size_t count);
    /// Caller-supplied enumeration; must be distinct sites starting at the origin.
    static SiteOrdering custom(int dim, std::vector<Coord> sites);

    OrderingStrategy strategy() const noexcept { return strategy_; }
    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return sites_.size(); }
    const Coord& operator[](std::size_t k) const { return sites_[k]; }
    const std::vector<Coord>& sites() const noexcept { return sites_; }

    /// Box-local indices of the box sites in ordering order. Sites of the box
    /// the ordering does not list are appended in L1ShellLex order.
    std::vector<std::size_t> restricted_to(const LatticeBox& box) const;

    std::string name() const { return std::string(to_string(strategy_)); }

private:
    SiteOrdering(OrderingStrategy strategy, int dim, std::vector<Coord> sites);

    OrderingStrategy strategy_;
    int dim_;
    std::vector<Coord> sites_;
};

/// Strict-weak "comes first" relation of a geometric strategy.
bool ordering_precedes(OrderingStrategy strategy, std::span<const int> a, std::span<const int> b);

/// Sorted-descending multiset of the nonzero values of `u` placed on the
/// first ordering sites. The output box is the smallest odd cube that holds
/// both `u`'s box and every placed value. Throws UsageError on negative input
/// or when the ordering is too short.
Field schwarz_rearrange(const Field& u, const SiteOrdering& ordering);
/// Convenience overload materialising the strategy's ordering.
Field schwarz_rearrange(const Field& u, OrderingStrategy strategy);

/// Rearrangement on the box itself (values placed along the box sites in
/// ordering order). Used by the solver so iterates stay on their box.
Field schwarz_rearrange_in_box(const Field& u, std::span<const std::size_t> box_order);

/// ||u - R u||_inf over the union of both supports.
double schwarz_defect(const Field& u, const SiteOrdering& ordering);
double schwarz_defect(const Field& u, OrderingStrategy strategy);

bool is_schwarz_symmetric(const Field& u, const SiteOrdering& ordering, double tol);
bool is_schwarz_symmetric(const Field& u, OrderingStrategy strategy, double tol);

struct PolyaSzegoPair
{
    double before = 0.0;
    double after = 0.0;
};

/// Dirichlet energy of u and of its rearrangement; the inequality is not asserted.
PolyaSzegoPair polya_szego_check(const Field& u, const SiteOrdering& ordering);

/// Order-independent hash of the multiset of nonzero values (FNV-1a over the
/// sorted bit patterns).
std::uint64_t value_multiset_hash(const Field& u);

struct RearrangeReport
{
    Field input;
    Field output;
    std::string ordering;
    std::uint64_t hash_before = 0;
    std::uint64_t hash_after = 0;
    double energy_before = 0.0;
    double energy_after = 0.0;
};

RearrangeReport rearrange_with_report(const Field& u, OrderingStrategy strategy);

} // namespace dnls
