#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace dnls
{
using Coord = std::vector<int>;

/// Origin-centred cube of side `side` (odd) in Z^dim. Sites are stored
/// row-major with coordinate 1 slowest; everything outside the cube is
/// treated as zero by the field operations.
class LatticeBox
{
public:
    LatticeBox(int dim, int side);

    int dim() const noexcept { return dim_; }
    int side() const noexcept { return side_; }
    int half() const noexcept { return (side_ - 1) / 2; }
    std::size_t size() const noexcept { return size_; }

    bool contains(std::span<const int> coord) const noexcept;
    std::size_t index_of(std::span<const int> coord) const;
    Coord coord_of(std::size_t index) const;

    /// Neighbour across direction `dir` in [0, 2*dim): 2d is +e_d, 2d+1 is -e_d.
    /// Returns -1 when the neighbour lies outside the box.
    std::ptrdiff_t neighbor(std::size_t index, int dir) const noexcept
    {
        return nbr_[index * static_cast<std::size_t>(2 * dim_) + static_cast<std::size_t>(dir)];
    }

    /// Number of neighbours inside the box (2*dim for interior sites).
    int in_box_degree(std::size_t index) const noexcept;
    bool on_boundary_shell(std::size_t index) const noexcept { return in_box_degree(index) < 2 * dim_; }

    bool operator==(const LatticeBox& other) const noexcept
    {
        return dim_ == other.dim_ && side_ == other.side_;
    }

private:
    int dim_;
    int side_;
    std::size_t size_;
    std::vector<std::size_t> strides_;
    std::vector<std::ptrdiff_t> nbr_;
};

using BoxPtr = std::shared_ptr<const LatticeBox>;

BoxPtr make_box(int dim, int side);

/// Real-valued function on a LatticeBox, zero outside.
class Field
{
public:
    explicit Field(BoxPtr box);
    Field(BoxPtr box, std::vector<double> values);

    static Field zeros(int dim, int side) { return Field(make_box(dim, side)); }

    const LatticeBox& box() const noexcept { return *box_; }
    const BoxPtr& box_ptr() const noexcept { return box_; }
    int dim() const noexcept { return box_->dim(); }
    int side() const noexcept { return box_->side(); }
    std::size_t size() const noexcept { return values_.size(); }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double& operator[](std::size_t i) noexcept { return values_[i]; }

    /// Value at an arbitrary lattice site (zero outside the box).
    double at(std::span<const int> coord) const;

    /// Same function on a box of a different side. Shrinking is allowed only
    /// when every dropped value is zero.
    Field resized(int side) const;

    bool is_finite() const noexcept;
    void require_finite() const;

    Field& operator+=(const Field& other);
    Field& operator*=(double scale) noexcept;

private:
    BoxPtr box_;
    std::vector<double> values_;
};

Field operator+(Field lhs, const Field& rhs);
Field operator*(double scale, Field u);
Field abs(Field u);

/// |grad u|^2(x) = 1/2 sum_{y~x} (u(y) - u(x))^2 for a box site x.
double grad_norm_sq_at(const Field& u, std::span<const int> site);

/// Sum over undirected edges of Z^dim of (u(y) - u(x))^2, zero extension
/// included; equals sum over all x in Z^dim of grad_norm_sq_at.
double dirichlet_energy(const Field& u);

/// Graph Laplacian (Delta u)(x) = sum_{y~x} (u(y) - u(x)) on the box sites.
Field laplacian(const Field& u);

/// l^p norm for p >= 1; pass std::numeric_limits<double>::infinity() for the sup norm.
double norm_lp(const Field& u, double p);

double inner(const Field& u, const Field& v);

/// ||u||_2^2.
double mass(const Field& u);

/// Mass carried by the outermost shell of the box.
double boundary_mass(const Field& u);

double min_value(const Field& u);

/// Copy of `u` translated by `shift` into `target`. Throws if any nonzero
/// value would land outside the target box.
Field shifted_into(const Field& u, std::span<const int> shift, const BoxPtr& target);

} // namespace dnls
