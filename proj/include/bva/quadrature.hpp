#pragma once

#include <Eigen/Dense>

#include <vector>

namespace bva {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre(int points);

/// Quadrature on the unit ball in local coordinates t (|t| < 1).
///
/// Cell-centre rule on a lattice with `cells_per_radius` cells per unit length;
/// lattice cells cut by the sphere are subdivided `refine` times per axis and
/// their sub-centres kept when inside. The rule is symmetric under coordinate
/// reflections.
class BallQuadrature {
public:
    BallQuadrature() = default;
    BallQuadrature(int n, int cells_per_radius, int refine = 8);

    int n() const noexcept { return n_; }
    int cells_per_radius() const noexcept { return cells_per_radius_; }
    std::size_t size() const noexcept { return weights_.size(); }
    /// n x size matrix of local points.
    const Eigen::MatrixXd& points() const noexcept { return points_; }
    const Eigen::VectorXd& weights() const noexcept { return weights_; }
    double volume() const noexcept { return weights_.sum(); }

private:
    int n_ = 0;
    int cells_per_radius_ = 0;
    Eigen::MatrixXd points_;
    Eigen::VectorXd weights_;
};

}  // namespace bva
