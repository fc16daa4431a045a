#include "bva/nullspace.hpp"

#include "bva/error.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace bva {

namespace {

double factorial(int k) { return std::tgamma(k + 1.0); }

double binomial(int a, int b) { return factorial(a) / (factorial(b) * factorial(a - b)); }

int total(const MultiIndex& b) { return std::accumulate(b.begin(), b.end(), 0); }

// All gamma <= beta componentwise.
void sub_indices(const MultiIndex& beta, std::size_t axis, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (axis == beta.size()) {
        out.push_back(cur);
        return;
    }
    for (int g = 0; g <= beta[axis]; ++g) {
        cur[axis] = g;
        sub_indices(beta, axis + 1, cur, out);
    }
}

}  // namespace

int default_cutoff(const Operator& op) { return 2 * (op.n() + op.N()) + 2; }

std::vector<PolynomialVectorField> homogeneous_solutions(const Operator& op, int d) {
    if (d < 0) throw DimensionError("degree must be nonnegative");
    const int n = op.n(), N = op.N(), K = op.K();
    const auto unknown_monos = homogeneous_monomials(n, d);
    const auto all_monos = monomials_upto(n, d);
    const Eigen::Index unknowns = N * static_cast<Eigen::Index>(unknown_monos.size());

    Eigen::MatrixXd null;
    if (d == 0) {
        null = Eigen::MatrixXd::Identity(unknowns, unknowns);
    } else {
        const auto eq_monos = homogeneous_monomials(n, d - 1);
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(K * static_cast<Eigen::Index>(eq_monos.size()), unknowns);
        for (std::size_t b = 0; b < unknown_monos.size(); ++b) {
            for (int a = 0; a < n; ++a) {
                const int e = unknown_monos[b][a];
                if (e == 0) continue;
                MultiIndex g = unknown_monos[b];
                g[a] -= 1;
                std::size_t gi = 0;
                while (eq_monos[gi] != g) ++gi;
                for (int j = 0; j < N; ++j)
                    for (int k = 0; k < K; ++k)
                        M(static_cast<Eigen::Index>(gi) * K + k, static_cast<Eigen::Index>(b) * N + j) +=
                            e * op.coeff(a)(k, j);
            }
        }
        Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
        const auto& s = svd.singularValues();
        const double smax = s.size() ? s[0] : 0.0;
        Eigen::Index rank = 0;
        while (rank < s.size() && s[rank] > kRankTolerance * smax) ++rank;
        null = svd.matrixV().rightCols(unknowns - rank);
    }

    std::vector<PolynomialVectorField> out;
    for (Eigen::Index c = 0; c < null.cols(); ++c) {
        Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(N, static_cast<Eigen::Index>(all_monos.size()));
        const std::size_t offset = all_monos.size() - unknown_monos.size();
        for (std::size_t b = 0; b < unknown_monos.size(); ++b)
            for (int j = 0; j < N; ++j)
                coeffs(j, static_cast<Eigen::Index>(offset + b)) = null(static_cast<Eigen::Index>(b) * N + j, c);
        out.emplace_back(all_monos, std::move(coeffs), Eigen::VectorXd::Zero(n), 1.0);
    }
    return out;
}

double KernelBasis::max_residual(const Operator& op) const {
    double r = 0.0;
    for (const auto& f : fields) r = std::max(r, f.apply(op).max_abs_coeff());
    return r;
}

Eigen::MatrixXd KernelBasis::gram() const {
    const Eigen::Index m = dimension();
    Eigen::MatrixXd g(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = a; b < m; ++b) g(a, b) = g(b, a) = fields[a].l2_inner(fields[b]);
    return g;
}

KernelBasis kernel_basis(const Operator& op, int cutoff) {
    if (cutoff < 1) throw DimensionError("kernel cutoff must be at least 1");
    KernelBasis kb;
    kb.cutoff = cutoff;
    std::vector<PolynomialVectorField> raw;
    for (int d = 0; d <= cutoff; ++d) {
        auto h = homogeneous_solutions(op, d);
        kb.dimension_by_degree.push_back(static_cast<int>(h.size()));
        for (auto& f : h) raw.push_back(std::move(f));
    }
    // Modified Gram-Schmidt with one reorthogonalisation pass, exact inner products.
    for (auto& f : raw) {
        PolynomialVectorField v = f;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : kb.fields) v = v - q * q.l2_inner(v);
        const double norm = std::sqrt(std::max(v.l2_inner(v), 0.0));
        if (norm < 1e-12) continue;
        v = v * (1.0 / norm);
        v.prune(1e-12);
        kb.fields.push_back(std::move(v));
    }
    for (int l = 0; l < cutoff; ++l) {
        bool empty_above = true;
        for (int d = l + 1; d <= cutoff; ++d) empty_above = empty_above && kb.dimension_by_degree[d] == 0;
        if (empty_above) {
            kb.minimal_l = l;
            break;
        }
    }
    return kb;
}

FdnProbe fdn_probe(const Operator& op, int cutoff) {
    if (cutoff < 4) throw DimensionError("kernel-growth probe needs cutoff >= 4");
    FdnProbe p;
    for (int d = 0; d <= cutoff; ++d) {
        p.dimension_by_degree.push_back(static_cast<int>(homogeneous_solutions(op, d).size()));
        p.dimension += p.dimension_by_degree.back();
    }
    p.stabilized = p.dimension_by_degree[cutoff] == 0 && p.dimension_by_degree[cutoff - 1] == 0;
    return p;
}

AveragedTaylor::AveragedTaylor(int n, Eigen::VectorXd center, double radius, int order, int cells_per_radius,
                               int weight_exponent)
    : n_(n),
      center_(std::move(center)),
      radius_(radius),
      order_(order),
      exponent_(weight_exponent < 0 ? order + 2 : weight_exponent),
      quad_(n, cells_per_radius) {
    if (center_.size() != n) throw DimensionError("ball centre dimension mismatch");
    if (!(radius > 0.0)) throw DimensionError("ball radius must be positive");
    if (order < 0) throw DimensionError("Taylor order must be nonnegative");
    if (cells_per_radius < 4) throw DimensionError("averaged Taylor quadrature needs >= 4 cells per radius");
    if (exponent_ < order + 1) throw DimensionError("weight exponent must be at least order + 1");

    const int m = exponent_;
    // omega(s) = (1 - |s|^2)^m / int_B (1 - |s|^2)^m, int = pi^(n/2) m! / Gamma(m + 1 + n/2).
    const double mass = std::exp(0.5 * n * std::log(std::numbers::pi) + std::lgamma(m + 1.0) -
                                 std::lgamma(m + 1.0 + 0.5 * n));
    Polynomial base = Polynomial::constant(n, 1.0);
    for (int a = 0; a < n; ++a) {
        MultiIndex e(n, 0);
        e[a] = 2;
        base = base + Polynomial::monomial(e, -1.0);
    }
    Polynomial omega = Polynomial::constant(n, 1.0 / mass);
    for (int k = 0; k < m; ++k) omega = omega * base;

    std::vector<Polynomial> kernels;
    for (const auto& beta : monomials_upto(n, order)) {
        std::vector<MultiIndex> gammas;
        MultiIndex cur(n, 0);
        sub_indices(beta, 0, cur, gammas);
        double beta_fact = 1.0;
        for (int b : beta) beta_fact *= factorial(b);
        for (const auto& gamma : gammas) {
            double c = 1.0;
            MultiIndex rest(n);
            for (int a = 0; a < n; ++a) {
                c *= binomial(beta[a], gamma[a]);
                rest[a] = beta[a] - gamma[a];
            }
            if (total(gamma) % 2) c = -c;
            Polynomial g = Polynomial::monomial(rest) * omega;
            for (int a = 0; a < n; ++a)
                for (int k = 0; k < beta[a]; ++k) g = g.derivative(a);
            terms_.push_back({gamma, c / beta_fact});
            kernels.push_back(std::move(g));
        }
    }
    weights_.resize(static_cast<Eigen::Index>(kernels.size()), static_cast<Eigen::Index>(quad_.size()));
    for (Eigen::Index q = 0; q < static_cast<Eigen::Index>(quad_.size()); ++q) {
        const Eigen::VectorXd s = quad_.points().col(q);
        for (std::size_t t = 0; t < kernels.size(); ++t)
            weights_(static_cast<Eigen::Index>(t), q) = quad_.weights()[q] * kernels[t].evaluate(s);
    }
}

PolynomialVectorField AveragedTaylor::apply(const FieldFn& u, int components) const {
    const Eigen::Index Q = static_cast<Eigen::Index>(quad_.size());
    Eigen::MatrixXd samples(components, Q);
    Point x(n_);
    std::vector<double> buf(components);
    for (Eigen::Index q = 0; q < Q; ++q) {
        x = center_ + radius_ * quad_.points().col(q);
        u(x, buf);
        for (int j = 0; j < components; ++j) samples(j, q) = buf[j];
    }
    const Eigen::MatrixXd moments = samples * weights_.transpose();  // components x terms
    auto monos = monomials_upto(n_, order_);
    Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(components, static_cast<Eigen::Index>(monos.size()));
    for (std::size_t t = 0; t < terms_.size(); ++t) {
        std::size_t gi = 0;
        while (monos[gi] != terms_[t].gamma) ++gi;
        coeffs.col(static_cast<Eigen::Index>(gi)) += terms_[t].factor * moments.col(static_cast<Eigen::Index>(t));
    }
    return PolynomialVectorField(std::move(monos), std::move(coeffs), center_, radius_);
}

PolynomialVectorField AveragedTaylor::apply(const DiscreteField& u) const {
    const Grid& g = u.grid();
    if (g.dim() != n_) throw DimensionError("grid dimension does not match ball");
    for (int a = 0; a < n_; ++a) {
        const double lo = g.origin()[a] + 0.5 * g.spacing();
        const double hi = g.upper()[a] - 0.5 * g.spacing();
        if (center_[a] - radius_ < lo - 1e-12 || center_[a] + radius_ > hi + 1e-12)
            throw DomainError("averaging ball is not contained in the field grid");
    }
    return apply(u.as_function(), u.components());
}

}  // namespace bva
