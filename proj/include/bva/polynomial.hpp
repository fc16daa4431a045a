#pragma once

#include "bva/operator.hpp"

#include <Eigen/Dense>

#include <map>
#include <span>
#include <vector>

namespace bva {

using MultiIndex = std::vector<int>;

/// Multi-indices with |beta| == degree in n variables, graded-lexicographic order
/// (x1 highest): for n=2, degree 2 gives (2,0), (1,1), (0,2).
std::vector<MultiIndex> homogeneous_monomials(int n, int degree);
/// All multi-indices with |beta| <= degree, by degree then graded-lex.
std::vector<MultiIndex> monomials_upto(int n, int degree);

/// Exact integral of t^beta over the unit ball of R^n.
double unit_ball_moment(const MultiIndex& beta);
double unit_ball_volume(int n);

/// Sparse scalar polynomial with exact (floating) coefficient arithmetic.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(int n) : n_(n) {}
    static Polynomial constant(int n, double c);
    static Polynomial monomial(const MultiIndex& beta, double c = 1.0);

    int n() const noexcept { return n_; }
    const std::map<MultiIndex, double>& terms() const noexcept { return terms_; }
    void add_term(const MultiIndex& beta, double c);
    int degree() const;

    Polynomial derivative(int axis) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator*(double s) const;
    double evaluate(const Eigen::Ref<const Eigen::VectorXd>& t) const;

private:
    int n_ = 0;
    std::map<MultiIndex, double> terms_;
};

/// Polynomial vector field p(x) = sum_beta c_beta ((x - center)/scale)^beta, c_beta in R^N.
/// The local frame (center, scale) keeps coefficients well conditioned on small balls.
class PolynomialVectorField {
public:
    PolynomialVectorField() = default;
    /// Zero field of the given degree in the unit frame.
    PolynomialVectorField(int n, int components, int degree);
    PolynomialVectorField(std::vector<MultiIndex> monomials, Eigen::MatrixXd coeffs,
                          Eigen::VectorXd center, double scale);

    int n() const noexcept { return n_; }
    int components() const noexcept { return static_cast<int>(coeffs_.rows()); }
    /// Highest degree carrying a nonzero coefficient (0 for the zero field).
    int degree() const;
    const std::vector<MultiIndex>& monomials() const noexcept { return monomials_; }
    const Eigen::MatrixXd& coeffs() const noexcept { return coeffs_; }
    Eigen::MatrixXd& coeffs() noexcept { return coeffs_; }
    const Eigen::VectorXd& center() const noexcept { return center_; }
    double scale() const noexcept { return scale_; }

    /// Coefficient of the monomial beta in component j (0 if absent).
    double coefficient(int j, const MultiIndex& beta) const;

    Eigen::VectorXd evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    void evaluate(const Eigen::Ref<const Eigen::VectorXd>& x, std::span<double> out) const;
    /// Monomial values ((x - center)/scale)^beta in monomial order.
    Eigen::VectorXd monomial_values(const Eigen::Ref<const Eigen::VectorXd>& x) const;

    /// Symbolic A p (K components, degree - 1), same frame.
    PolynomialVectorField apply(const Operator& op) const;
    /// Same field expressed in another frame (exact re-expansion).
    PolynomialVectorField reframed(const Eigen::VectorXd& center, double scale) const;

    /// Exact L^2 inner product over the frame ball B(center, scale); fields must share a frame.
    double l2_inner(const PolynomialVectorField& o) const;

    /// Sets coefficients with |c| < tol to zero.
    void prune(double tol = 1e-12);

    PolynomialVectorField operator+(const PolynomialVectorField& o) const;
    PolynomialVectorField operator-(const PolynomialVectorField& o) const;
    PolynomialVectorField operator*(double s) const;

    double max_abs_coeff() const { return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : 0.0; }

private:
    int n_ = 0;
    std::vector<MultiIndex> monomials_;
    Eigen::MatrixXd coeffs_;  // components x monomials
    Eigen::VectorXd center_;
    double scale_ = 1.0;
};

}  // namespace bva
