#include "dnls/test_functions.hpp"

#include <cmath>

#include "dnls/errors.hpp"

namespace dnls
{
namespace
{
Field delta(const DeltaKind& k, const BoxPtr& box)
{
    if (!(k.zeta > 0.0))
        throw UsageError("delta amplitude must be positive");
    Field u(box);
    const Coord origin(static_cast<std::size_t>(box->dim()), 0);
    u[box->index_of(origin)] = k.zeta;
    return u;
}

Field block(const BoxKind& k, const BoxPtr& box)
{
    if (!(k.m > 0.0) || k.n < 1)
        throw UsageError("box profile needs m > 0 and n >= 1");
    if (k.n > box->side())
        throw UsageError("box profile width " + std::to_string(k.n) + " exceeds box side " +
                         std::to_string(box->side()));
    const int lo = -(k.n / 2);
    const int hi = lo + k.n - 1;
    const double value = std::sqrt(k.m) * std::pow(static_cast<double>(k.n), -0.5 * box->dim());
    Field u(box);
    for (std::size_t i = 0; i < u.size(); ++i)
    {
        const auto c = box->coord_of(i);
        bool inside = true;
        for (int x : c)
            inside = inside && x >= lo && x <= hi;
        if (inside)
            u[i] = value;
    }
    return u;
}

Field gaussian(const GaussianKind& k, const BoxPtr& box)
{
    if (!(k.m > 0.0) || !(k.sigma > 0.0))
        throw UsageError("gaussian needs m > 0 and sigma > 0");
    Field u(box);
    for (std::size_t i = 0; i < u.size(); ++i)
    {
        double r2 = 0.0;
        for (int x : box->coord_of(i))
            r2 += static_cast<double>(x) * x;
        u[i] = std::exp(-r2 / (2.0 * k.sigma * k.sigma));
    }
    u *= std::sqrt(k.m / mass(u));
    return u;
}

} // namespace

Field make_test_function(const TestFunctionKind& kind, const BoxPtr& box)
{
    if (!box)
        throw UsageError("test function requires a box");
    return std::visit(
        [&](const auto& k) -> Field {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, DeltaKind>)
                return delta(k, box);
            else if constexpr (std::is_same_v<K, BoxKind>)
                return block(k, box);
            else
                return gaussian(k, box);
        },
        kind);
}

} // namespace dnls
