#include "dnls/rearrange.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <set>

#include "dnls/errors.hpp"

namespace dnls
{
namespace
{
int l1_norm(std::span<const int> c)
{
    int s = 0;
    for (int v : c)
        s += std::abs(v);
    return s;
}

int linf_norm(std::span<const int> c)
{
    int s = 0;
    for (int v : c)
        s = std::max(s, std::abs(v));
    return s;
}

void require_nonnegative(const Field& u)
{
    for (double v : u.values())
        if (v < 0.0)
            throw UsageError("Schwarz rearrangement requires a nonnegative field");
}

// Enumerate every site of the cube [-r, r]^dim.
std::vector<Coord> cube_sites(int dim, int r)
{
    std::vector<Coord> out;
    Coord c(static_cast<std::size_t>(dim), -r);
    while (true)
    {
        out.push_back(c);
        int d = dim - 1;
        while (d >= 0 && c[static_cast<std::size_t>(d)] == r)
        {
            c[static_cast<std::size_t>(d)] = -r;
            --d;
        }
        if (d < 0)
            break;
        ++c[static_cast<std::size_t>(d)];
    }
    return out;
}

// Number of sites with l1 norm <= r (or l_inf norm <= r) in Z^dim, saturating.
double ball_count(OrderingStrategy s, int dim, int r)
{
    if (s == OrderingStrategy::LinfShellLex)
        return std::pow(2.0 * r + 1.0, dim);
    // |{x : |x|_1 <= r}| = sum_k 2^k C(dim,k) C(r,k)
    double total = 0.0;
    for (int k = 0; k <= std::min(dim, r); ++k)
    {
        double term = std::pow(2.0, k);
        for (int j = 0; j < k; ++j)
            term *= static_cast<double>(dim - j) * (r - j) / ((j + 1.0) * (j + 1.0));
        total += term;
    }
    return total;
}

int smallest_odd_side_holding(std::span<const Coord> sites, std::size_t count, int at_least)
{
    int h = (at_least - 1) / 2;
    for (std::size_t k = 0; k < count; ++k)
        h = std::max(h, linf_norm(sites[k]));
    return 2 * h + 1;
}

} // namespace

std::string_view to_string(OrderingStrategy s)
{
    switch (s)
    {
    case OrderingStrategy::L1ShellLex: return "l1shell";
    case OrderingStrategy::LinfShellLex: return "linfshell";
    case OrderingStrategy::Custom: return "custom";
    }
    return "unknown";
}

OrderingStrategy ordering_from_string(std::string_view name)
{
    if (name == "l1shell")
        return OrderingStrategy::L1ShellLex;
    if (name == "linfshell")
        return OrderingStrategy::LinfShellLex;
    throw UsageError("unknown ordering '" + std::string(name) + "' (expected l1shell or linfshell)");
}

bool ordering_precedes(OrderingStrategy strategy, std::span<const int> a, std::span<const int> b)
{
    if (strategy == OrderingStrategy::L1ShellLex)
    {
        const int la = l1_norm(a), lb = l1_norm(b);
        if (la != lb)
            return la < lb;
    }
    const int ia = linf_norm(a), ib = linf_norm(b);
    if (ia != ib)
        return ia < ib;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

//---------------------------------------------------------------------------//

SiteOrdering::SiteOrdering(OrderingStrategy strategy, int dim, std::vector<Coord> sites)
    : strategy_(strategy), dim_(dim), sites_(std::move(sites))
{
}

SiteOrdering SiteOrdering::first_sites(OrderingStrategy strategy, int dim, std::size_t count)
{
    if (strategy == OrderingStrategy::Custom)
        throw UsageError("custom orderings are built with SiteOrdering::custom");
    if (dim < 1)
        throw UsageError("dimension must be >= 1");
    int r = 0;
    while (ball_count(strategy, dim, r) < static_cast<double>(count))
        ++r;
    auto sites = cube_sites(dim, r);
    auto cmp = [strategy](const Coord& a, const Coord& b) { return ordering_precedes(strategy, a, b); };
    const auto keep = std::min(count, sites.size());
    std::partial_sort(sites.begin(), sites.begin() + static_cast<std::ptrdiff_t>(keep), sites.end(), cmp);
    sites.resize(keep);
    return SiteOrdering(strategy, dim, std::move(sites));
}

SiteOrdering SiteOrdering::custom(int dim, std::vector<Coord> sites)
{
    if (sites.empty())
        throw UsageError("custom ordering is empty");
    std::set<Coord> seen;
    for (const auto& s : sites)
    {
        if (s.size() != static_cast<std::size_t>(dim))
            throw UsageError("custom ordering site has the wrong dimension");
        if (!seen.insert(s).second)
            throw UsageError("custom ordering lists a site twice");
    }
    if (linf_norm(sites.front()) != 0)
        throw UsageError("custom ordering must start at the origin");
    return SiteOrdering(OrderingStrategy::Custom, dim, std::move(sites));
}

std::vector<std::size_t> SiteOrdering::restricted_to(const LatticeBox& box) const
{
    if (box.dim() != dim_)
        throw UsageError("ordering and box dimensions differ");
    std::vector<std::size_t> order;
    order.reserve(box.size());
    if (strategy_ != OrderingStrategy::Custom)
    {
        std::vector<Coord> coords(box.size());
        for (std::size_t i = 0; i < box.size(); ++i)
            coords[i] = box.coord_of(i);
        order.resize(box.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        const auto s = strategy_;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return ordering_precedes(s, coords[a], coords[b]);
        });
        return order;
    }
    std::vector<char> used(box.size(), 0);
    for (const auto& c : sites_)
    {
        if (!box.contains(c))
            continue;
        const auto i = box.index_of(c);
        order.push_back(i);
        used[i] = 1;
    }
    for (auto i : SiteOrdering::first_sites(OrderingStrategy::L1ShellLex, dim_, 1).restricted_to(box))
        if (!used[i])
            order.push_back(i);
    return order;
}

//---------------------------------------------------------------------------//

Field schwarz_rearrange(const Field& u, const SiteOrdering& ordering)
{
    require_nonnegative(u);
    if (ordering.dim() != u.dim())
        throw UsageError("ordering and field dimensions differ");
    std::vector<double> vals;
    for (double v : u.values())
        if (v != 0.0)
            vals.push_back(v);
    std::sort(vals.begin(), vals.end(), std::greater<>());
    if (vals.size() > ordering.size())
        throw UsageError("ordering is shorter than the number of nonzero values");

    const int side = smallest_odd_side_holding(ordering.sites(), vals.size(), u.side());
    Field out(make_box(u.dim(), side));
    for (std::size_t k = 0; k < vals.size(); ++k)
        out[out.box().index_of(ordering[k])] = vals[k];
    return out;
}

Field schwarz_rearrange(const Field& u, OrderingStrategy strategy)
{
    return schwarz_rearrange(u, SiteOrdering::first_sites(strategy, u.dim(), u.size()));
}

Field schwarz_rearrange_in_box(const Field& u, std::span<const std::size_t> box_order)
{
    require_nonnegative(u);
    if (box_order.size() != u.size())
        throw UsageError("box ordering does not cover the box");
    std::vector<double> vals(u.values().begin(), u.values().end());
    std::sort(vals.begin(), vals.end(), std::greater<>());
    Field out(u.box_ptr());
    for (std::size_t k = 0; k < vals.size(); ++k)
        out[box_order[k]] = vals[k];
    return out;
}

double schwarz_defect(const Field& u, const SiteOrdering& ordering)
{
    const Field r = schwarz_rearrange(u, ordering);
    const Field a = u.resized(r.side());
    double worst = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - r[i]));
    return worst;
}

double schwarz_defect(const Field& u, OrderingStrategy strategy)
{
    return schwarz_defect(u, SiteOrdering::first_sites(strategy, u.dim(), u.size()));
}

bool is_schwarz_symmetric(const Field& u, const SiteOrdering& ordering, double tol)
{
    return schwarz_defect(u, ordering) <= tol;
}

bool is_schwarz_symmetric(const Field& u, OrderingStrategy strategy, double tol)
{
    return schwarz_defect(u, strategy) <= tol;
}

PolyaSzegoPair polya_szego_check(const Field& u, const SiteOrdering& ordering)
{
    return {dirichlet_energy(u), dirichlet_energy(schwarz_rearrange(u, ordering))};
}

std::uint64_t value_multiset_hash(const Field& u)
{
    std::vector<double> vals;
    for (double v : u.values())
        if (v != 0.0)
            vals.push_back(v);
    std::sort(vals.begin(), vals.end());
    std::uint64_t h = 14695981039346656037ull;
    for (double v : vals)
    {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b)
        {
            h ^= (bits >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    }
    return h;
}

RearrangeReport rearrange_with_report(const Field& u, OrderingStrategy strategy)
{
    Field out = schwarz_rearrange(u, strategy);
    RearrangeReport rep{u, out, std::string(to_string(strategy)), value_multiset_hash(u),
                        value_multiset_hash(out), dirichlet_energy(u), dirichlet_energy(out)};
    return rep;
}

} // namespace dnls
