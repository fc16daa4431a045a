#pragma once

#include "bva/discrete.hpp"
#include "bva/operator.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace bva {

/// Truncated Fourier series u_j(x) = sum_k a_jk cos(k.x) + b_jk sin(k.x), integer |k|_inf <= cap,
/// seeded normal coefficients decaying like 1 / (1 + |k|^2).
class FourierField {
public:
    FourierField(int n, int N, std::uint64_t seed, int cap = 4, double amplitude = 1.0);

    int dim() const noexcept { return n_; }
    int components() const noexcept { return N_; }

    void evaluate(const Point& x, std::span<double> out) const;
    /// N x n Jacobian.
    Eigen::MatrixXd jacobian(const Point& x) const;
    /// (A u)(x) from the analytic Jacobian.
    Eigen::VectorXd apply(const Operator& op, const Point& x) const;
    FieldFn function() const;

private:
    int n_, N_;
    std::vector<Eigen::VectorXd> freqs_;
    Eigen::MatrixXd cos_, sin_;  ///< N x modes
};

std::vector<FourierField> random_fields(int n, int N, int count, std::uint64_t seed, int cap = 4);

/// Sample files: "dims=", "origin=", "spacing=", "components=" header lines, then one
/// N-vector per cell in row-major cell order. '#' starts a comment.
DiscreteField read_field(std::istream& in);
DiscreteField read_field_file(const std::filesystem::path& path);
void write_field(std::ostream& out, const DiscreteField& u);

}  // namespace bva
