#include "bva/polynomial.hpp"

#include "bva/error.hpp"

#include <cmath>
#include <numeric>

namespace bva {

namespace {

void enumerate(int n, int remaining, int axis, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (axis == n - 1) {
        cur[axis] = remaining;
        out.push_back(cur);
        return;
    }
    for (int e = remaining; e >= 0; --e) {
        cur[axis] = e;
        enumerate(n, remaining - e, axis + 1, cur, out);
    }
}

int index_of(const std::vector<MultiIndex>& list, const MultiIndex& beta) {
    for (std::size_t i = 0; i < list.size(); ++i)
        if (list[i] == beta) return static_cast<int>(i);
    return -1;
}

}  // namespace

std::vector<MultiIndex> homogeneous_monomials(int n, int degree) {
    std::vector<MultiIndex> out;
    if (degree < 0 || n < 1) return out;
    MultiIndex cur(n, 0);
    enumerate(n, degree, 0, cur, out);
    return out;
}

std::vector<MultiIndex> monomials_upto(int n, int degree) {
    std::vector<MultiIndex> out;
    for (int d = 0; d <= degree; ++d) {
        auto h = homogeneous_monomials(n, d);
        out.insert(out.end(), h.begin(), h.end());
    }
    return out;
}

double unit_ball_moment(const MultiIndex& beta) {
    // prod Gamma((b_i+1)/2) / Gamma((|b|+n)/2 + 1) for all b_i even, else 0.
    double log_num = 0.0;
    int total = 0;
    for (int b : beta) {
        if (b % 2 != 0) return 0.0;
        log_num += std::lgamma((b + 1) / 2.0);
        total += b;
    }
    const int n = static_cast<int>(beta.size());
    return std::exp(log_num - std::lgamma((total + n) / 2.0 + 1.0));
}

double unit_ball_volume(int n) { return unit_ball_moment(MultiIndex(n, 0)); }

Polynomial Polynomial::constant(int n, double c) {
    Polynomial p(n);
    p.add_term(MultiIndex(n, 0), c);
    return p;
}

Polynomial Polynomial::monomial(const MultiIndex& beta, double c) {
    Polynomial p(static_cast<int>(beta.size()));
    p.add_term(beta, c);
    return p;
}

void Polynomial::add_term(const MultiIndex& beta, double c) {
    if (static_cast<int>(beta.size()) != n_) throw DimensionError("monomial dimension mismatch");
    if (c == 0.0) return;
    auto& slot = terms_[beta];
    slot += c;
    if (slot == 0.0) terms_.erase(beta);
}

int Polynomial::degree() const {
    int d = 0;
    for (const auto& [beta, c] : terms_) d = std::max(d, std::accumulate(beta.begin(), beta.end(), 0));
    return d;
}

Polynomial Polynomial::derivative(int axis) const {
    Polynomial out(n_);
    for (const auto& [beta, c] : terms_) {
        if (beta[axis] == 0) continue;
        MultiIndex b = beta;
        b[axis] -= 1;
        out.add_term(b, c * beta[axis]);
    }
    return out;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    Polynomial out(n_);
    for (const auto& [a, ca] : terms_)
        for (const auto& [b, cb] : o.terms_) {
            MultiIndex s(n_);
            for (int i = 0; i < n_; ++i) s[i] = a[i] + b[i];
            out.add_term(s, ca * cb);
        }
    return out;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    Polynomial out = *this;
    for (const auto& [b, c] : o.terms_) out.add_term(b, c);
    return out;
}

Polynomial Polynomial::operator*(double s) const {
    Polynomial out(n_);
    for (const auto& [b, c] : terms_) out.add_term(b, c * s);
    return out;
}

double Polynomial::evaluate(const Eigen::Ref<const Eigen::VectorXd>& t) const {
    double s = 0.0;
    for (const auto& [beta, c] : terms_) {
        double m = c;
        for (int i = 0; i < n_; ++i)
            for (int e = 0; e < beta[i]; ++e) m *= t[i];
        s += m;
    }
    return s;
}

PolynomialVectorField::PolynomialVectorField(int n, int components, int degree)
    : n_(n),
      monomials_(monomials_upto(n, degree)),
      coeffs_(Eigen::MatrixXd::Zero(components, static_cast<Eigen::Index>(monomials_.size()))),
      center_(Eigen::VectorXd::Zero(n)),
      scale_(1.0) {}

PolynomialVectorField::PolynomialVectorField(std::vector<MultiIndex> monomials, Eigen::MatrixXd coeffs,
                                             Eigen::VectorXd center, double scale)
    : n_(static_cast<int>(center.size())),
      monomials_(std::move(monomials)),
      coeffs_(std::move(coeffs)),
      center_(std::move(center)),
      scale_(scale) {
    if (coeffs_.cols() != static_cast<Eigen::Index>(monomials_.size()))
        throw DimensionError("coefficient table does not match monomial list");
    if (!(scale_ > 0.0)) throw DimensionError("polynomial frame scale must be positive");
    for (const auto& m : monomials_)
        if (static_cast<int>(m.size()) != n_) throw DimensionError("monomial dimension mismatch");
}

int PolynomialVectorField::degree() const {
    int d = 0;
    for (std::size_t i = 0; i < monomials_.size(); ++i)
        if (coeffs_.col(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff() > 0.0)
            d = std::max(d, std::accumulate(monomials_[i].begin(), monomials_[i].end(), 0));
    return d;
}

double PolynomialVectorField::coefficient(int j, const MultiIndex& beta) const {
    const int i = index_of(monomials_, beta);
    return i < 0 ? 0.0 : coeffs_(j, i);
}

Eigen::VectorXd PolynomialVectorField::monomial_values(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (x.size() != n_) throw DimensionError("evaluation point dimension mismatch");
    int maxdeg = 0;
    for (const auto& m : monomials_)
        for (int e : m) maxdeg = std::max(maxdeg, e);
    Eigen::MatrixXd powers(n_, maxdeg + 1);
    for (int i = 0; i < n_; ++i) {
        const double t = (x[i] - center_[i]) / scale_;
        powers(i, 0) = 1.0;
        for (int e = 1; e <= maxdeg; ++e) powers(i, e) = powers(i, e - 1) * t;
    }
    Eigen::VectorXd mv(static_cast<Eigen::Index>(monomials_.size()));
    for (std::size_t k = 0; k < monomials_.size(); ++k) {
        double v = 1.0;
        for (int i = 0; i < n_; ++i) v *= powers(i, monomials_[k][i]);
        mv[static_cast<Eigen::Index>(k)] = v;
    }
    return mv;
}

Eigen::VectorXd PolynomialVectorField::evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return coeffs_ * monomial_values(x);
}

void PolynomialVectorField::evaluate(const Eigen::Ref<const Eigen::VectorXd>& x, std::span<double> out) const {
    const Eigen::VectorXd v = evaluate(x);
    for (int j = 0; j < components(); ++j) out[j] = v[j];
}

PolynomialVectorField PolynomialVectorField::apply(const Operator& op) const {
    if (op.n() != n_ || op.N() != components()) throw DimensionError("operator does not act on this field");
    int deg = 0;
    for (const auto& m : monomials_) deg = std::max(deg, std::accumulate(m.begin(), m.end(), 0));
    auto out_monos = monomials_upto(n_, std::max(deg - 1, 0));
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(op.K(), static_cast<Eigen::Index>(out_monos.size()));
    for (std::size_t i = 0; i < monomials_.size(); ++i) {
        for (int a = 0; a < n_; ++a) {
            const int e = monomials_[i][a];
            if (e == 0) continue;
            MultiIndex b = monomials_[i];
            b[a] -= 1;
            const int target = index_of(out_monos, b);
            out.col(target) += (e / scale_) * (op.coeff(a) * coeffs_.col(static_cast<Eigen::Index>(i)));
        }
    }
    return PolynomialVectorField(std::move(out_monos), std::move(out), center_, scale_);
}

PolynomialVectorField PolynomialVectorField::reframed(const Eigen::VectorXd& center, double scale) const {
    // t = (x - c)/s = d + lambda t',  t' = (x - c')/s'.
    const Eigen::VectorXd d = (center - center_) / scale_;
    const double lambda = scale / scale_;
    int deg = 0;
    for (const auto& m : monomials_) deg = std::max(deg, std::accumulate(m.begin(), m.end(), 0));
    auto out_monos = monomials_upto(n_, deg);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(components(), static_cast<Eigen::Index>(out_monos.size()));
    std::vector<Polynomial> linear(n_);
    for (int i = 0; i < n_; ++i) {
        MultiIndex e(n_, 0);
        e[i] = 1;
        linear[i] = Polynomial::constant(n_, d[i]) + Polynomial::monomial(e, lambda);
    }
    for (std::size_t k = 0; k < monomials_.size(); ++k) {
        Polynomial p = Polynomial::constant(n_, 1.0);
        for (int i = 0; i < n_; ++i)
            for (int e = 0; e < monomials_[k][i]; ++e) p = p * linear[i];
        for (const auto& [beta, c] : p.terms()) {
            const int target = index_of(out_monos, beta);
            out.col(target) += c * coeffs_.col(static_cast<Eigen::Index>(k));
        }
    }
    return PolynomialVectorField(std::move(out_monos), std::move(out), center, scale);
}

double PolynomialVectorField::l2_inner(const PolynomialVectorField& o) const {
    if (n_ != o.n_ || components() != o.components()) throw DimensionError("field shape mismatch");
    if (scale_ != o.scale_ || center_ != o.center_) throw DimensionError("fields must share a frame");
    double s = 0.0;
    for (std::size_t a = 0; a < monomials_.size(); ++a)
        for (std::size_t b = 0; b < o.monomials_.size(); ++b) {
            const double dot = coeffs_.col(static_cast<Eigen::Index>(a)).dot(o.coeffs_.col(static_cast<Eigen::Index>(b)));
            if (dot == 0.0) continue;
            MultiIndex sum(n_);
            for (int i = 0; i < n_; ++i) sum[i] = monomials_[a][i] + o.monomials_[b][i];
            s += dot * unit_ball_moment(sum);
        }
    return s * std::pow(scale_, n_);
}

void PolynomialVectorField::prune(double tol) {
    coeffs_ = coeffs_.unaryExpr([tol](double v) { return std::abs(v) < tol ? 0.0 : v; });
}

PolynomialVectorField PolynomialVectorField::operator+(const PolynomialVectorField& o) const {
    if (o.center_ != center_ || o.scale_ != scale_) return *this + o.reframed(center_, scale_);
    if (o.monomials_ == monomials_)
        return PolynomialVectorField(monomials_, coeffs_ + o.coeffs_, center_, scale_);
    const int deg = std::max(degree(), o.degree());
    auto monos = monomials_upto(n_, std::max(deg, 0));
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(components(), static_cast<Eigen::Index>(monos.size()));
    for (std::size_t k = 0; k < monomials_.size(); ++k) {
        const int t = index_of(monos, monomials_[k]);
        if (t >= 0) c.col(t) += coeffs_.col(static_cast<Eigen::Index>(k));
    }
    for (std::size_t k = 0; k < o.monomials_.size(); ++k) {
        const int t = index_of(monos, o.monomials_[k]);
        if (t >= 0) c.col(t) += o.coeffs_.col(static_cast<Eigen::Index>(k));
    }
    return PolynomialVectorField(std::move(monos), std::move(c), center_, scale_);
}

PolynomialVectorField PolynomialVectorField::operator-(const PolynomialVectorField& o) const {
    return *this + o * -1.0;
}

PolynomialVectorField PolynomialVectorField::operator*(double s) const {
    return PolynomialVectorField(monomials_, coeffs_ * s, center_, scale_);
}

}  // namespace bva
