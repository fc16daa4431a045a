#pragma once

#include "bva/operator.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bva {

/// Spatial point, n <= 3, no heap allocation.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

/// Pointwise vector field x -> out (out has the field's component count).
using FieldFn = std::function<void(const Point& x, std::span<double> out)>;

/// Uniform cell-centred grid. Flat cell indices are row-major (axis 0 slowest).
class Grid {
public:
    Grid() = default;
    Grid(std::vector<int> cells, Point origin, double spacing);

    /// Grid of `cells_per_axis` cells per axis covering the box [lo, hi] in every axis
    /// (the box must be a cube; spacing = (hi - lo) / cells_per_axis).
    static Grid cube(int dim, double lo, double hi, int cells_per_axis);

    int dim() const noexcept { return static_cast<int>(cells_.size()); }
    const std::vector<int>& cells() const noexcept { return cells_; }
    int cells(int axis) const { return cells_.at(axis); }
    const Point& origin() const noexcept { return origin_; }
    double spacing() const noexcept { return spacing_; }
    double cell_volume() const noexcept { return cell_volume_; }
    std::size_t size() const noexcept { return size_; }
    std::size_t stride(int axis) const { return strides_.at(axis); }

    Point center(std::size_t idx) const;
    int coord(std::size_t idx, int axis) const {
        return static_cast<int>((idx / strides_[axis]) % static_cast<std::size_t>(cells_[axis]));
    }
    Point lower() const { return origin_; }
    Point upper() const;

    bool operator==(const Grid& o) const {
        return cells_ == o.cells_ && origin_ == o.origin_ && spacing_ == o.spacing_;
    }

private:
    std::vector<int> cells_;
    Point origin_;
    double spacing_ = 1.0;
    double cell_volume_ = 1.0;
    std::size_t size_ = 0;
    std::vector<std::size_t> strides_;
};

/// Grid-sampled field u : Omega -> R^N, values at cell centres.
class DiscreteField {
public:
    DiscreteField() = default;
    DiscreteField(Grid grid, int components);
    DiscreteField(Grid grid, int components, std::vector<double> values);

    static DiscreteField sample(const Grid& grid, int components, const FieldFn& f);

    const Grid& grid() const noexcept { return grid_; }
    int components() const noexcept { return components_; }
    std::span<double> at(std::size_t cell) { return {values_.data() + cell * components_, std::size_t(components_)}; }
    std::span<const double> at(std::size_t cell) const {
        return {values_.data() + cell * components_, std::size_t(components_)};
    }
    std::vector<double>& values() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }

    /// Multilinear interpolation between cell centres; constant beyond the outer centres.
    void interpolate(const Point& x, std::span<double> out) const;
    FieldFn as_function() const;

    double max_abs() const;
    /// sum_cells h^n |u_c| over cells with mask (empty mask = all cells).
    double l1_norm(std::span<const char> mask = {}) const;

    DiscreteField& operator+=(const DiscreteField& o);
    DiscreteField& operator-=(const DiscreteField& o);
    DiscreteField& operator*=(double s);

private:
    Grid grid_;
    int components_ = 0;
    std::vector<double> values_;
};

DiscreteField operator-(DiscreteField a, const DiscreteField& b);
DiscreteField operator+(DiscreteField a, const DiscreteField& b);

/// Point mass on a surface element: `mass` is the K-vector already multiplied by `weight`.
struct SingularAtom {
    Point x;
    double weight = 0.0;
    Eigen::VectorXd mass;
};

/// Discretised vector measure A u = density L^n + singular part.
struct MeasureField {
    Grid grid;
    int components = 0;
    std::vector<double> density;  ///< cell-major, `components` per cell
    std::vector<SingularAtom> singular;

    std::span<const double> at(std::size_t cell) const {
        return {density.data() + cell * components, std::size_t(components)};
    }
    std::span<double> at(std::size_t cell) { return {density.data() + cell * components, std::size_t(components)}; }

    /// sum h^n |density| (masked) + sum |singular mass|.
    double total_variation(std::span<const char> mask = {}) const;
    double singular_total() const;
    /// <mu, phi> = sum h^n density . phi(x_c) (masked) + sum mass . phi(x_s).
    double pair(const FieldFn& phi, std::span<const char> mask = {}) const;
};

/// Forward differences D_alpha, one-sided (backward) on the last cell of each axis;
/// density = sum_alpha A_alpha D_alpha u. Throws DimensionError when an axis has < 2 cells.
MeasureField apply_discrete(const Operator& op, const DiscreteField& u);

/// Exact matrix transpose of apply_discrete: returns sum_alpha A_alpha^T D_alpha^T p.
DiscreteField apply_transpose(const Operator& op, const Grid& grid, std::span<const double> p);

/// Lower bound on |Au|(grid box) by duality: max over a seeded family of test fields phi,
/// |phi| <= 1, vanishing on the outermost cell layer, of |sum h^n <u, A_h^T phi>|.
/// The family holds random bump combinations and the sign pattern of the discrete density.
double total_variation_dual(const Operator& op, const DiscreteField& u, int test_budget = 64,
                            std::uint64_t seed = 1);

}  // namespace bva
