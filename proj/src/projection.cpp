#include "bva/projection.hpp"

#include "bva/error.hpp"

#include <cmath>
#include <random>

namespace bva {

struct KernelProjector::Template {
    std::vector<PolynomialVectorField> basis;
    BallQuadrature quad;
    Eigen::MatrixXd values;  // (Q N) x d, basis values at quadrature points
    Eigen::MatrixXd weighted_t;  // d x (Q N), V^T diag(w)
    Eigen::LDLT<Eigen::MatrixXd> gram;
    double gram_tolerance = 0.0;
    int components = 0;
};

KernelProjector::KernelProjector(const KernelBasis& basis, Eigen::VectorXd center, double radius,
                                 int cells_per_radius)
    : center_(std::move(center)), radius_(radius) {
    if (basis.fields.empty()) throw DimensionError("kernel basis is empty");
    if (!(radius > 0.0)) throw DimensionError("ball radius must be positive");
    const int n = basis.fields.front().n();
    if (center_.size() != n) throw DimensionError("ball centre dimension mismatch");
    auto t = std::make_shared<Template>();
    t->components = basis.fields.front().components();
    for (const auto& f : basis.fields) t->basis.push_back(f.reframed(Eigen::VectorXd::Zero(n), 1.0));
    t->quad = BallQuadrature(n, cells_per_radius);
    const Eigen::Index Q = static_cast<Eigen::Index>(t->quad.size());
    const Eigen::Index d = static_cast<Eigen::Index>(t->basis.size());
    const int N = t->components;
    t->values.resize(Q * N, d);
    for (Eigen::Index q = 0; q < Q; ++q) {
        const Eigen::VectorXd s = t->quad.points().col(q);
        for (Eigen::Index i = 0; i < d; ++i) t->values.block(q * N, i, N, 1) = t->basis[i].evaluate(s);
    }
    Eigen::VectorXd w(Q * N);
    for (Eigen::Index q = 0; q < Q; ++q) w.segment(q * N, N).setConstant(t->quad.weights()[q]);
    t->weighted_t = (w.asDiagonal() * t->values).transpose();
    const Eigen::MatrixXd G = t->weighted_t * t->values;
    t->gram_tolerance = (G - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
    t->gram.compute(G);
    if (t->gram.info() != Eigen::Success || t->gram.vectorD().minCoeff() <= 1e-12)
        throw InconsistencyError("discrete Gram matrix of the kernel basis is singular");
    tpl_ = std::move(t);
}

KernelProjector KernelProjector::moved(Eigen::VectorXd center, double radius) const {
    if (!(radius > 0.0)) throw DimensionError("ball radius must be positive");
    if (center.size() != center_.size()) throw DimensionError("ball centre dimension mismatch");
    KernelProjector p;
    p.tpl_ = tpl_;
    p.center_ = std::move(center);
    p.radius_ = radius;
    return p;
}

int KernelProjector::components() const noexcept { return tpl_ ? tpl_->components : 0; }
int KernelProjector::dimension() const noexcept { return tpl_ ? static_cast<int>(tpl_->basis.size()) : 0; }
double KernelProjector::gram_tolerance() const noexcept { return tpl_ ? tpl_->gram_tolerance : 0.0; }
const BallQuadrature& KernelProjector::quadrature() const { return tpl_->quad; }
const std::vector<PolynomialVectorField>& KernelProjector::unit_basis() const { return tpl_->basis; }

Eigen::MatrixXd KernelProjector::points() const {
    return (radius_ * tpl_->quad.points()).colwise() + center_;
}

Eigen::VectorXd KernelProjector::coefficients(std::span<const double> samples) const {
    if (static_cast<Eigen::Index>(samples.size()) != tpl_->values.rows())
        throw DimensionError("sample count does not match the projector quadrature");
    const Eigen::Map<const Eigen::VectorXd> s(samples.data(), static_cast<Eigen::Index>(samples.size()));
    return tpl_->gram.solve(tpl_->weighted_t * s);
}

Eigen::VectorXd KernelProjector::coefficients(const FieldFn& u) const {
    const int N = components();
    const Eigen::MatrixXd pts = points();
    std::vector<double> samples(static_cast<std::size_t>(pts.cols()) * N);
    Point x(n());
    for (Eigen::Index q = 0; q < pts.cols(); ++q) {
        x = pts.col(q);
        u(x, std::span<double>(samples.data() + q * N, N));
    }
    return coefficients(samples);
}

PolynomialVectorField KernelProjector::field(const Eigen::VectorXd& c) const {
    PolynomialVectorField sum = tpl_->basis.front() * c[0];
    for (Eigen::Index i = 1; i < c.size(); ++i) sum = sum + tpl_->basis[i] * c[i];
    return PolynomialVectorField(sum.monomials(), sum.coeffs(), center_, radius_);
}

PolynomialVectorField KernelProjector::project(const FieldFn& u) const { return field(coefficients(u)); }

PolynomialVectorField KernelProjector::project(const DiscreteField& u) const {
    const Grid& g = u.grid();
    if (g.dim() != n()) throw DimensionError("grid dimension does not match ball");
    if (u.components() != components()) throw DimensionError("field components do not match kernel basis");
    const Point up = g.upper();
    for (int a = 0; a < n(); ++a) {
        const double lo = g.origin()[a] + 0.5 * g.spacing();
        const double hi = up[a] - 0.5 * g.spacing();
        if (center_[a] - radius_ < lo - 1e-12 || center_[a] + radius_ > hi + 1e-12)
            throw DomainError("projection ball is not contained in the field grid");
    }
    return project(u.as_function());
}

PolynomialVectorField KernelProjector::project(const PolynomialVectorField& q) const {
    return project([&q](const Point& x, std::span<double> out) { q.evaluate(x, out); });
}

double inverse_estimate_constant(const KernelProjector& p, int trials, std::uint64_t seed) {
    if (trials < 1) throw DimensionError("trials must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    const auto& quad = p.quadrature();
    const auto& basis = p.unit_basis();
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd c(p.dimension());
        for (auto& v : c) v = gauss(rng);
        double sup = 0.0, mean = 0.0;
        Eigen::VectorXd val(p.components());
        for (Eigen::Index q = 0; q < static_cast<Eigen::Index>(quad.size()); ++q) {
            val.setZero();
            const Eigen::VectorXd s = quad.points().col(q);
            for (int i = 0; i < p.dimension(); ++i) val += c[i] * basis[i].evaluate(s);
            const double a = val.norm();
            sup = std::max(sup, a);
            mean += quad.weights()[q] * a;
        }
        mean /= quad.volume();
        if (mean > 0.0) worst = std::max(worst, sup / mean);
    }
    return worst;
}

double l1_stability_constant(const KernelProjector& p, const std::vector<FieldFn>& fields) {
    const auto& quad = p.quadrature();
    const Eigen::MatrixXd pts = p.points();
    const int N = p.components();
    double worst = 0.0;
    std::vector<double> buf(N);
    Point x(p.n());
    for (const auto& u : fields) {
        const PolynomialVectorField pu = p.project(u);
        double num = 0.0, den = 0.0;
        for (Eigen::Index q = 0; q < pts.cols(); ++q) {
            x = pts.col(q);
            u(x, buf);
            den += quad.weights()[q] * Eigen::Map<Eigen::VectorXd>(buf.data(), N).norm();
            num += quad.weights()[q] * pu.evaluate(pts.col(q)).norm();
        }
        if (den > 0.0) worst = std::max(worst, num / den);
    }
    return worst;
}

std::vector<char> ball_mask(const Grid& grid, const Eigen::VectorXd& center, double radius) {
    std::vector<char> mask(grid.size(), 0);
    for (std::size_t c = 0; c < grid.size(); ++c)
        mask[c] = (grid.center(c) - center).squaredNorm() < radius * radius;
    return mask;
}

namespace {

double masked_l1(const DiscreteField& u, const std::vector<char>& mask) { return u.l1_norm(mask); }

PoincareRatio finish_ratio(double numerator, double av, double diameter, double u_l1) {
    PoincareRatio r;
    r.numerator = numerator;
    r.denominator = diameter * av;
    if (av < kDegenerateRatio * u_l1 / diameter || r.denominator == 0.0) {
        if (numerator > 1e-6 * std::max(u_l1, 1e-300) && u_l1 > 0.0)
            throw DegenerateInputError("A u vanishes on the ball but u is not a kernel field");
        r.kernel = true;
        r.value = 0.0;
        return r;
    }
    r.value = numerator / r.denominator;
    return r;
}

}  // namespace

PoincareRatio poincare_ratio(const Operator& op, const KernelProjector& p, const DiscreteField& u) {
    const Grid& g = u.grid();
    const auto mask = ball_mask(g, p.center(), p.radius());
    const PolynomialVectorField pu = p.project(u);
    DiscreteField diff = u;
    std::vector<double> buf(u.components());
    for (std::size_t c = 0; c < g.size(); ++c) {
        if (!mask[c]) continue;
        pu.evaluate(g.center(c), buf);
        auto v = diff.at(c);
        for (int j = 0; j < u.components(); ++j) v[j] -= buf[j];
    }
    const double numerator = masked_l1(diff, mask);
    const double av = apply_discrete(op, u).total_variation(mask);
    return finish_ratio(numerator, av, 2.0 * p.radius(), masked_l1(u, mask));
}

PoincareRatio poincare_zero_extension(const Operator& op, const Ball& inner, const Ball& outer,
                                      const DiscreteField& u) {
    if (inner.radius > outer.radius || (inner.center - outer.center).norm() + inner.radius > outer.radius + 1e-12)
        throw DimensionError("inner ball must lie inside the outer ball");
    if (inner.radius < 0.25 * outer.radius) throw DimensionError("inner/outer radius ratio must be at least 1/4");
    const Grid& g = u.grid();
    const auto inner_mask = ball_mask(g, inner.center, inner.radius);
    const auto outer_mask = ball_mask(g, outer.center, outer.radius);
    const double scale = std::max(u.max_abs(), 1.0);
    for (std::size_t c = 0; c < g.size(); ++c) {
        if (!inner_mask[c]) continue;
        for (double v : u.at(c))
            if (std::abs(v) > 1e-12 * scale) throw DegenerateInputError("field does not vanish on the inner ball");
    }
    const double u_l1 = masked_l1(u, outer_mask);
    const double av = apply_discrete(op, u).total_variation(outer_mask);
    return finish_ratio(u_l1, av, 2.0 * outer.radius, u_l1);
}

}  // namespace bva
