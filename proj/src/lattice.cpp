#include "dnls/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dnls/errors.hpp"
#include "dnls/summation.hpp"

namespace dnls
{
LatticeBox::LatticeBox(int dim, int side)
    : dim_(dim), side_(side)
{
    if (dim < 1)
        throw UsageError("lattice dimension must be >= 1, got " + std::to_string(dim));
    if (side < 3 || side % 2 == 0)
        throw UsageError("box side must be an odd integer >= 3, got " + std::to_string(side));

    double total = std::pow(static_cast<double>(side), dim);
    if (total > 5e8)
        throw UsageError("box with side^dim = " + std::to_string(total) + " sites is too large");

    strides_.assign(static_cast<std::size_t>(dim), 1);
    for (int d = dim - 2; d >= 0; --d)
        strides_[static_cast<std::size_t>(d)] =
            strides_[static_cast<std::size_t>(d + 1)] * static_cast<std::size_t>(side);
    size_ = strides_[0] * static_cast<std::size_t>(side);

    const auto ndir = static_cast<std::size_t>(2 * dim);
    nbr_.assign(size_ * ndir, -1);
    for (std::size_t i = 0; i < size_; ++i)
    {
        for (int d = 0; d < dim; ++d)
        {
            const auto stride = strides_[static_cast<std::size_t>(d)];
            const auto c = static_cast<int>((i / stride) % static_cast<std::size_t>(side));
            auto* row = &nbr_[i * ndir];
            if (c + 1 < side)
                row[2 * d] = static_cast<std::ptrdiff_t>(i + stride);
            if (c > 0)
                row[2 * d + 1] = static_cast<std::ptrdiff_t>(i - stride);
        }
    }
}

bool LatticeBox::contains(std::span<const int> coord) const noexcept
{
    if (coord.size() != static_cast<std::size_t>(dim_))
        return false;
    const int h = half();
    return std::all_of(coord.begin(), coord.end(), [h](int c) { return c >= -h && c <= h; });
}

std::size_t LatticeBox::index_of(std::span<const int> coord) const
{
    if (coord.size() != static_cast<std::size_t>(dim_))
        throw UsageError("site has " + std::to_string(coord.size()) + " coordinates, box has dim " +
                         std::to_string(dim_));
    if (!contains(coord))
        throw UsageError("site lies outside the box");
    std::size_t idx = 0;
    for (int d = 0; d < dim_; ++d)
        idx += static_cast<std::size_t>(coord[static_cast<std::size_t>(d)] + half()) *
               strides_[static_cast<std::size_t>(d)];
    return idx;
}

Coord LatticeBox::coord_of(std::size_t index) const
{
    if (index >= size_)
        throw UsageError("site index out of range");
    Coord c(static_cast<std::size_t>(dim_));
    for (int d = 0; d < dim_; ++d)
    {
        const auto stride = strides_[static_cast<std::size_t>(d)];
        c[static_cast<std::size_t>(d)] =
            static_cast<int>((index / stride) % static_cast<std::size_t>(side_)) - half();
    }
    return c;
}

int LatticeBox::in_box_degree(std::size_t index) const noexcept
{
    int deg = 0;
    for (int k = 0; k < 2 * dim_; ++k)
        deg += neighbor(index, k) >= 0 ? 1 : 0;
    return deg;
}

BoxPtr make_box(int dim, int side)
{
    return std::make_shared<const LatticeBox>(dim, side);
}

//---------------------------------------------------------------------------//

Field::Field(BoxPtr box)
    : box_(std::move(box))
{
    if (!box_)
        throw UsageError("field requires a box");
    values_.assign(box_->size(), 0.0);
}

Field::Field(BoxPtr box, std::vector<double> values)
    : box_(std::move(box)), values_(std::move(values))
{
    if (!box_)
        throw UsageError("field requires a box");
    if (values_.size() != box_->size())
        throw UsageError("field has " + std::to_string(values_.size()) + " values, box has " +
                         std::to_string(box_->size()) + " sites");
    require_finite();
}

double Field::at(std::span<const int> coord) const
{
    if (coord.size() != static_cast<std::size_t>(dim()))
        throw UsageError("coordinate dimension mismatch");
    if (!box_->contains(coord))
        return 0.0;
    return values_[box_->index_of(coord)];
}

Field Field::resized(int side) const
{
    if (side == this->side())
        return *this;
    Field out(make_box(dim(), side));
    const auto& target = out.box();
    for (std::size_t i = 0; i < size(); ++i)
    {
        if (values_[i] == 0.0)
            continue;
        const auto c = box_->coord_of(i);
        if (!target.contains(c))
            throw UsageError("resizing would drop nonzero values");
        out.values_[target.index_of(c)] = values_[i];
    }
    return out;
}

bool Field::is_finite() const noexcept
{
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void Field::require_finite() const
{
    if (!is_finite())
        throw UsageError("field contains non-finite values");
}

Field& Field::operator+=(const Field& other)
{
    if (!(box() == other.box()))
        throw UsageError("box mismatch in field addition");
    for (std::size_t i = 0; i < size(); ++i)
        values_[i] += other.values_[i];
    return *this;
}

Field& Field::operator*=(double scale) noexcept
{
    for (auto& v : values_)
        v *= scale;
    return *this;
}

Field operator+(Field lhs, const Field& rhs)
{
    lhs += rhs;
    return lhs;
}

Field operator*(double scale, Field u)
{
    u *= scale;
    return u;
}

Field abs(Field u)
{
    for (auto& v : u.values())
        v = std::abs(v);
    return u;
}

//---------------------------------------------------------------------------//

double grad_norm_sq_at(const Field& u, std::span<const int> site)
{
    const auto& box = u.box();
    const auto i = box.index_of(site);
    const double ux = u[i];
    CompensatedSum acc;
    for (int k = 0; k < 2 * box.dim(); ++k)
    {
        const auto j = box.neighbor(i, k);
        const double diff = (j >= 0 ? u[static_cast<std::size_t>(j)] : 0.0) - ux;
        acc += diff * diff;
    }
    return 0.5 * acc.value();
}

double dirichlet_energy(const Field& u)
{
    const auto& box = u.box();
    CompensatedSum acc;
    for (std::size_t i = 0; i < u.size(); ++i)
    {
        const double ux = u[i];
        for (int d = 0; d < box.dim(); ++d)
        {
            // Each undirected edge is visited once from its lower endpoint;
            // edges leaving through the lower face have no in-box lower end.
            const auto up = box.neighbor(i, 2 * d);
            const double diff = (up >= 0 ? u[static_cast<std::size_t>(up)] : 0.0) - ux;
            acc += diff * diff;
            if (box.neighbor(i, 2 * d + 1) < 0)
                acc += ux * ux;
        }
    }
    return acc.value();
}

Field laplacian(const Field& u)
{
    const auto& box = u.box();
    const int ndir = 2 * box.dim();
    Field out(u.box_ptr());
    for (std::size_t i = 0; i < u.size(); ++i)
    {
        double s = 0.0;
        for (int k = 0; k < ndir; ++k)
        {
            const auto j = box.neighbor(i, k);
            if (j >= 0)
                s += u[static_cast<std::size_t>(j)];
        }
        out[i] = s - ndir * u[i];
    }
    return out;
}

double norm_lp(const Field& u, double p)
{
    if (std::isnan(p) || p < 1.0)
        throw UsageError("l^p norm requires p >= 1");
    double peak = 0.0;
    for (double v : u.values())
        peak = std::max(peak, std::abs(v));
    if (std::isinf(p) || peak == 0.0)
        return peak;
    CompensatedSum acc;
    for (double v : u.values())
        acc += std::pow(std::abs(v) / peak, p);
    return peak * std::pow(acc.value(), 1.0 / p);
}

double inner(const Field& u, const Field& v)
{
    if (!(u.box() == v.box()))
        throw UsageError("inner product of fields on different boxes");
    CompensatedSum acc;
    for (std::size_t i = 0; i < u.size(); ++i)
        acc += u[i] * v[i];
    return acc.value();
}

double mass(const Field& u)
{
    CompensatedSum acc;
    for (double v : u.values())
        acc += v * v;
    return acc.value();
}

double boundary_mass(const Field& u)
{
    const auto& box = u.box();
    CompensatedSum acc;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (box.on_boundary_shell(i))
            acc += u[i] * u[i];
    return acc.value();
}

double min_value(const Field& u)
{
    return *std::min_element(u.values().begin(), u.values().end());
}

Field shifted_into(const Field& u, std::span<const int> shift, const BoxPtr& target)
{
    if (shift.size() != static_cast<std::size_t>(u.dim()) || target->dim() != u.dim())
        throw UsageError("shift dimension mismatch");
    Field out(target);
    for (std::size_t i = 0; i < u.size(); ++i)
    {
        if (u[i] == 0.0)
            continue;
        auto c = u.box().coord_of(i);
        for (std::size_t d = 0; d < c.size(); ++d)
            c[d] += shift[d];
        if (!target->contains(c))
            throw UsageError("shifted field does not fit in the target box");
        out[target->index_of(c)] = u[i];
    }
    return out;
}

} // namespace dnls
