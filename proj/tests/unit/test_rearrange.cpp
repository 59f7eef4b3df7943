#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "dnls/errors.hpp"
#include "dnls/rearrange.hpp"
#include "oracles.hpp"

using namespace dnls;

namespace
{
std::vector<double> sorted_nonzero(const Field& u)
{
    std::vector<double> v;
    for (double x : u.values())
        if (x != 0.0)
            v.push_back(x);
    std::sort(v.begin(), v.end());
    return v;
}

int l1(const Coord& c)
{
    int s = 0;
    for (int x : c)
        s += std::abs(x);
    return s;
}
} // namespace

TEST_CASE("l1-shell ordering starts at the origin and never decreases in l1 norm")
{
    for (int dim : {1, 2, 3})
    {
        const auto ord = SiteOrdering::first_sites(OrderingStrategy::L1ShellLex, dim, 200);
        CHECK(l1(ord[0]) == 0);
        for (std::size_t k = 1; k < ord.size(); ++k)
            CHECK(l1(ord[k - 1]) <= l1(ord[k]));
        auto sites = ord.sites();
        std::sort(sites.begin(), sites.end());
        CHECK(std::adjacent_find(sites.begin(), sites.end()) == sites.end());
    }
    const auto ord1 = SiteOrdering::first_sites(OrderingStrategy::L1ShellLex, 1, 5);
    CHECK(ord1[1] == Coord{-1});
    CHECK(ord1[2] == Coord{1});
}

TEST_CASE("custom ordering validation")
{
    CHECK_THROWS_AS(SiteOrdering::custom(1, {{1}, {0}}), UsageError);
    CHECK_THROWS_AS(SiteOrdering::custom(1, {{0}, {1}, {1}}), UsageError);
    CHECK_THROWS_AS(SiteOrdering::custom(2, {{0}}), UsageError);
    const auto ord = SiteOrdering::custom(1, {{0}, {1}, {-1}});
    Field u = Field::zeros(1, 3);
    u[0] = 1.0;
    u[1] = 3.0;
    u[2] = 2.0;
    const Field r = schwarz_rearrange(u, ord);
    CHECK(r.at(Coord{0}) == 3.0);
    CHECK(r.at(Coord{1}) == 2.0);
    CHECK(r.at(Coord{-1}) == 1.0);
}

TEST_CASE("equimeasurability and idempotence on random fields")
{
    for (int dim : {1, 2, 3})
        for (std::uint64_t seed = 0; seed < 30; ++seed)
        {
            const int side = dim == 1 ? 31 : dim == 2 ? 9 : 5;
            const Field u = oracle::random_field(dim, side, seed, 0.0, 1.0, 0.6);
            const Field r = schwarz_rearrange(u, OrderingStrategy::L1ShellLex);
            CHECK(sorted_nonzero(r) == sorted_nonzero(u));
            CHECK(value_multiset_hash(r) == value_multiset_hash(u));
            const Field rr = schwarz_rearrange(r, OrderingStrategy::L1ShellLex);
            REQUIRE(rr.side() == r.side());
            CHECK(std::equal(rr.values().begin(), rr.values().end(), r.values().begin()));
            CHECK(schwarz_defect(r, OrderingStrategy::L1ShellLex) == 0.0);
        }
}

TEST_CASE("one-dimensional Polya-Szego")
{
    for (std::uint64_t seed = 0; seed < 200; ++seed)
    {
        const Field u = oracle::random_field(1, 21, seed, 0.0, 1.0, 0.5);
        const Field r = schwarz_rearrange(u, OrderingStrategy::L1ShellLex);
        CHECK(oracle::dirichlet(r) <= oracle::dirichlet(u) * (1.0 + 1e-12));
    }
}

TEST_CASE("output box grows to hold every placed value")
{
    Field u = Field::zeros(1, 3);
    std::fill(u.values().begin(), u.values().end(), 1.0);
    const auto ord = SiteOrdering::custom(1, {{0}, {2}, {4}});
    const Field r = schwarz_rearrange(u, ord);
    CHECK(r.side() == 9);
    CHECK(r.at(Coord{4}) == 1.0);
    CHECK(r.at(Coord{1}) == 0.0);
}

TEST_CASE("negative input and short orderings are usage errors")
{
    Field u = Field::zeros(1, 3);
    u[0] = -1.0;
    CHECK_THROWS_AS(schwarz_rearrange(u, OrderingStrategy::L1ShellLex), UsageError);
    Field v = Field::zeros(1, 3);
    std::fill(v.values().begin(), v.values().end(), 1.0);
    CHECK_THROWS_AS(schwarz_rearrange(v, SiteOrdering::custom(1, {{0}, {1}})), UsageError);
}

TEST_CASE("in-box rearrangement keeps the box")
{
    const Field u = oracle::random_field(2, 7, 5, 0.0, 1.0);
    const auto order = SiteOrdering::first_sites(OrderingStrategy::L1ShellLex, 2, 1).restricted_to(u.box());
    const Field r = schwarz_rearrange_in_box(u, order);
    CHECK(r.side() == 7);
    CHECK(sorted_nonzero(r) == sorted_nonzero(u));
    CHECK(r[order[0]] == *std::max_element(u.values().begin(), u.values().end()));
}

TEST_CASE("report records the energies and hashes")
{
    const Field u = oracle::random_field(2, 7, 9, 0.0, 1.0, 0.3);
    const auto rep = rearrange_with_report(u, OrderingStrategy::LinfShellLex);
    CHECK(rep.ordering == "linfshell");
    CHECK(rep.hash_before == rep.hash_after);
    CHECK(rep.energy_before == doctest::Approx(oracle::dirichlet(u)));
    CHECK(rep.energy_after == doctest::Approx(oracle::dirichlet(rep.output)));
}
