#pragma once

#include "bva/nullspace.hpp"
#include "bva/operator.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>

namespace bva {

struct RealWitness {
    Eigen::VectorXd xi;
    Eigen::VectorXd eta;
    double value = 0.0;  ///< |A[xi] eta| with |xi| = |eta| = 1
};

struct ComplexWitness {
    Eigen::VectorXcd xi;
    Eigen::VectorXcd eta;
    double value = 0.0;
};

struct RealEllipticity {
    bool elliptic = false;
    double kappa1 = 0.0;  ///< min over the real sphere of the smallest singular value
    double kappa2 = 0.0;  ///< max over the real sphere of the largest singular value
    double tolerance = 0.0;
    std::optional<RealWitness> witness;  ///< present when not elliptic
    RealWitness minimizer;               ///< pair attaining kappa1 (always filled)
};

struct ComplexEllipticity {
    bool elliptic = false;
    double minimum = 0.0;  ///< smallest singular value found on the complex sphere
    double tolerance = 0.0;
    std::optional<ComplexWitness> witness;
    FdnProbe probe;  ///< kernel-growth cross-check
};

struct Cancelling {
    bool cancelling = false;
    Eigen::MatrixXd intersection_basis;  ///< K x d orthonormal
    int frequencies = 0;                 ///< number of ranges intersected
    bool numeric = true;                 ///< verdict is sampled, not exact
    std::string warning;                 ///< set when the operator is not R-elliptic
};

struct EllipticityReport {
    bool r_elliptic = false;
    bool c_elliptic = false;
    bool cancelling = false;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    std::optional<RealWitness> witness_real;
    std::optional<ComplexWitness> witness_complex;
    double tolerance = 0.0;
    double complex_minimum = 0.0;
    int cancelling_dimension = 0;
    std::string cancelling_warning;
    FdnProbe probe;
};

/// Relative zero threshold, scaled by kappa2.
inline constexpr double kEllipticityTolerance = 1e-6;

/// Sphere sampling with `grid_density` points per angle, then alternating refinement
/// (eta from the smallest singular vector of A[xi], xi from that of xi -> A[xi] eta).
RealEllipticity check_r_elliptic(const Operator& op, int grid_density = 12);

/// Same search over the complex unit sphere of C^n (a real 2n-sphere). Throws
/// InconsistencyError when the verdict disagrees with fdn_probe.
ComplexEllipticity check_c_elliptic(const Operator& op, int grid_density = 12);

/// Sampled intersection of the ranges A[xi](R^N) over coordinate and random unit xi.
Cancelling check_cancelling(const Operator& op, int samples = 64, std::uint64_t seed = 1);

EllipticityReport classify(const Operator& op, int grid_density = 12, std::uint64_t seed = 1,
                           int cancelling_samples = 64);

}  // namespace bva
