#pragma once

#include "bva/discrete.hpp"
#include "bva/nullspace.hpp"
#include "bva/operator.hpp"
#include "bva/polynomial.hpp"
#include "bva/quadrature.hpp"

#include <cstdint>
#include <memory>

namespace bva {

/// L^2(B)-orthogonal projection onto the span of a kernel basis, B = B(center, radius).
///
/// The basis is carried in the unit frame of the ball, t = (x - c)/r, which is exact
/// because N(A) is invariant under translation and dilation. Coefficients are taken
/// against the discrete Gram matrix of the ball quadrature, so span elements are
/// reproduced to rounding and the projector is idempotent.
class KernelProjector {
public:
    KernelProjector() = default;
    KernelProjector(const KernelBasis& basis, Eigen::VectorXd center, double radius, int cells_per_radius = 32);

    /// Same basis and quadrature on another ball (shares the precomputed template).
    KernelProjector moved(Eigen::VectorXd center, double radius) const;

    int n() const noexcept { return static_cast<int>(center_.size()); }
    int components() const noexcept;
    int dimension() const noexcept;
    const Eigen::VectorXd& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }
    double gram_tolerance() const noexcept;
    const BallQuadrature& quadrature() const;
    /// Basis fields orthonormal in the exact L^2 of the unit ball (unit frame).
    const std::vector<PolynomialVectorField>& unit_basis() const;

    /// Coefficients with respect to unit_basis() of the projection of u.
    Eigen::VectorXd coefficients(const FieldFn& u) const;
    /// Same from samples at the quadrature points, laid out component-major per point.
    Eigen::VectorXd coefficients(std::span<const double> samples) const;
    /// Quadrature points of this ball in global coordinates (n x Q).
    Eigen::MatrixXd points() const;
    PolynomialVectorField field(const Eigen::VectorXd& coefficients) const;

    PolynomialVectorField project(const FieldFn& u) const;
    /// Throws DomainError if the ball is not inside the grid's cell-centre box.
    PolynomialVectorField project(const DiscreteField& u) const;
    PolynomialVectorField project(const PolynomialVectorField& q) const;

private:
    struct Template;
    std::shared_ptr<const Template> tpl_;
    Eigen::VectorXd center_;
    double radius_ = 1.0;
};

/// max over `trials` random kernel elements q of sup_B |q| / mean_B |q|.
double inverse_estimate_constant(const KernelProjector& p, int trials, std::uint64_t seed = 1);

/// mean_B |Pi u| / mean_B |u| maximised over random samples `fields`.
double l1_stability_constant(const KernelProjector& p, const std::vector<FieldFn>& fields);

struct PoincareRatio {
    double value = 0.0;
    double numerator = 0.0;    ///< ||u - Pi u||_{L1(B)} (or ||u||)
    double denominator = 0.0;  ///< diam(B) ||A u||_{L1(B)}
    bool kernel = false;       ///< u lies in the kernel (0/0)
};

/// Denominator below kDegenerateRatio * ||u||_{L1(B)} / diam(B) marks a kernel field.
inline constexpr double kDegenerateRatio = 1e-9;

/// ||u - Pi_B u||_{L1(B)} / (diam(B) ||A u||_{L1(B)}), integrals by the cell-centre rule on
/// grid cells whose centres lie in B; A u by apply_discrete.
PoincareRatio poincare_ratio(const Operator& op, const KernelProjector& p, const DiscreteField& u);

struct Ball {
    Eigen::VectorXd center;
    double radius = 1.0;
};

/// ||u||_{L1(B)} / (diam(B) ||A u||_{L1(B)}) for u vanishing on `inner` (checked), B = outer.
PoincareRatio poincare_zero_extension(const Operator& op, const Ball& inner, const Ball& outer,
                                      const DiscreteField& u);

/// Cells of `grid` whose centres lie in the ball.
std::vector<char> ball_mask(const Grid& grid, const Eigen::VectorXd& center, double radius);

}  // namespace bva
