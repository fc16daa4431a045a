#pragma once

#include "bva/discrete.hpp"
#include "bva/operator.hpp"
#include "bva/polynomial.hpp"
#include "bva/quadrature.hpp"

#include <optional>
#include <vector>

namespace bva {

/// Basis of polynomial solutions of A u = 0 up to a degree cutoff, orthonormal in
/// L^2 of the unit ball (unit frame).
struct KernelBasis {
    std::vector<PolynomialVectorField> fields;
    std::vector<int> dimension_by_degree;  ///< homogeneous solutions per degree 0..cutoff
    std::optional<int> minimal_l;          ///< degrees l+1..cutoff carry no solutions
    int cutoff = 0;

    int dimension() const noexcept { return static_cast<int>(fields.size()); }
    /// Max |coefficient| of A p over all basis fields (symbolic differentiation).
    double max_residual(const Operator& op) const;
    /// Gram matrix over the unit ball, computed from exact moments.
    Eigen::MatrixXd gram() const;
};

/// Default degree cap 2(n+N)+2.
int default_cutoff(const Operator& op);

/// Basis of homogeneous degree-d polynomial fields p with A p == 0, from the exact
/// coefficient system and a rank-revealing SVD (relative tolerance 1e-10).
std::vector<PolynomialVectorField> homogeneous_solutions(const Operator& op, int d);

KernelBasis kernel_basis(const Operator& op, int cutoff);

struct FdnProbe {
    bool stabilized = false;  ///< no solutions in degrees cutoff-1 and cutoff
    int dimension = 0;        ///< total solutions found up to cutoff
    std::vector<int> dimension_by_degree;
};

/// Finite-dimensional-nullspace probe by kernel growth; cutoff >= 4.
FdnProbe fdn_probe(const Operator& op, int cutoff);

/// Averaged Taylor polynomial of order l on ball B(center, radius) with weight
/// w(y) proportional to (1 - |y - c|^2 / r^2)^m, unit integral, m = l + 2 by default.
/// Orders sharing one weight satisfy d_a P^l u = P^(l-1) d_a u; m must be at least l + 1.
class AveragedTaylor {
public:
    AveragedTaylor(int n, Eigen::VectorXd center, double radius, int order, int cells_per_radius = 32,
                   int weight_exponent = -1);

    int n() const noexcept { return n_; }
    int order() const noexcept { return order_; }
    int weight_exponent() const noexcept { return exponent_; }
    const Eigen::VectorXd& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }
    const BallQuadrature& quadrature() const noexcept { return quad_; }

    /// Result is expressed in the ball frame (center, radius).
    PolynomialVectorField apply(const FieldFn& u, int components) const;
    /// Samples the grid field by interpolation; throws DomainError if the ball leaves the grid box.
    PolynomialVectorField apply(const DiscreteField& u) const;

private:
    struct Term {
        MultiIndex gamma;
        double factor;  // C(beta, gamma) (-1)^|gamma| / beta!
    };
    int n_;
    Eigen::VectorXd center_;
    double radius_;
    int order_;
    int exponent_;
    BallQuadrature quad_;
    std::vector<Term> terms_;
    Eigen::MatrixXd weights_;  // terms x quadrature points: w_q * d^beta(s^(beta-gamma) omega)(s_q)
};

}  // namespace bva
