#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bva {

using Complex = std::complex<double>;

/// First-order, constant-coefficient operator A u = sum_alpha A_alpha d_alpha u
/// mapping R^N-valued fields on R^n to R^K-valued fields.
///
/// Matrix-valued targets are flattened row-major: entry (j, k) of an N x n
/// matrix sits at index j * n + k. Symmetric targets are stored unpacked.
class Operator {
public:
    Operator() = default;
    /// Throws DimensionError if the coefficient list is empty, ragged, or all zero.
    explicit Operator(std::vector<Eigen::MatrixXd> coeffs, std::string name = {});

    int n() const noexcept { return static_cast<int>(coeffs_.size()); }
    int N() const noexcept { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_[0].cols()); }
    int K() const noexcept { return coeffs_.empty() ? 0 : static_cast<int>(coeffs_[0].rows()); }

    const std::vector<Eigen::MatrixXd>& coeffs() const noexcept { return coeffs_; }
    const Eigen::MatrixXd& coeff(int alpha) const { return coeffs_.at(alpha); }
    const std::string& name() const noexcept { return name_; }

    /// A[xi] = sum_alpha xi_alpha A_alpha.
    Eigen::MatrixXd symbol(const Eigen::VectorXd& xi) const;
    Eigen::MatrixXcd symbol(const Eigen::VectorXcd& xi) const;

    /// v (x)_A z = A[z] v.
    Eigen::VectorXd pairing(const Eigen::VectorXd& v, const Eigen::VectorXd& z) const;

    /// Operator with transposed coefficients A_alpha^T, dimensions (n, K, N).
    Operator adjoint() const;

    Operator scaled(double c) const;

    /// Largest |A_alpha| entry; used for relative tolerances.
    double max_abs_coeff() const;

    bool operator==(const Operator& other) const;

private:
    std::vector<Eigen::MatrixXd> coeffs_;
    std::string name_;
};

/// Catalog operators.
///   gradient   : N configurable, K = N n
///   symgrad    : N = n, K = n^2, (v (x) z)_{jk} = (v_j z_k + v_k z_j)/2
///   devsymgrad : symgrad minus (1/n) div(u) Id
///   remark25   : n = 3, N = 2, K = 6, R-elliptic and cancelling, not C-elliptic
///   d1only     : n arbitrary, N = 1, K = 1, A u = d_1 u (not R-elliptic for n >= 2)
/// `N <= 0` selects the operator's natural N.
Operator builtin(std::string_view name, int n, int N = 0);

/// Parses "builtin:NAME,n[,N]" or an operator file path.
Operator load_operator(std::string_view source);

/// Operator file text: header lines n=, N=, K=, then blocks "A<alpha>:" with K rows of N numbers.
Operator parse_operator(std::istream& in);
Operator parse_operator_file(const std::filesystem::path& path);
std::string format_operator(const Operator& op);

struct ConeSample {
    Eigen::MatrixXd generators;       ///< K x m, column i = pairing(v_i, z_i)
    Eigen::MatrixXd vs;               ///< N x m
    Eigen::MatrixXd zs;               ///< n x m
    Eigen::MatrixXd effective_range;  ///< K x r, orthonormal columns

    int range_dimension() const noexcept { return static_cast<int>(effective_range.cols()); }
    /// Largest distance of a generator from span(effective_range).
    double max_generator_residual() const;
};

/// Samples the rank-one cone {v (x)_A z} and an orthonormal basis of its span.
ConeSample cone_and_range(const Operator& op, int samples, std::uint64_t seed = 1);

/// Rank cut used for range computations: singular values below
/// `kRankTolerance` times the largest are treated as zero.
inline constexpr double kRankTolerance = 1e-10;

/// Orthonormal basis of the column span of `m` at relative tolerance `tol`.
Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& m, double tol = kRankTolerance);

}  // namespace bva
