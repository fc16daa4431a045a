#include <doctest.h>

#include "bva/fields.hpp"
#include "bva/nullspace.hpp"
#include "bva/operator.hpp"
#include "bva/projection.hpp"

#include <cmath>
#include <numbers>

using namespace bva;

namespace {

KernelBasis basis_of(const std::string& name, int n, int N = 0) {
    const Operator op = builtin(name, n, N);
    return kernel_basis(op, default_cutoff(op));
}

// Fine polar midpoint quadrature over the unit disk.
template <class F>
double disk_integral(F&& f) {
    const int R = 400, T = 512;
    double s = 0.0;
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < T; ++j) {
            const double r = (i + 0.5) / R, t = 2.0 * std::numbers::pi * (j + 0.5) / T;
            s += f(r * std::cos(t), r * std::sin(t)) * r * (1.0 / R) * (2.0 * std::numbers::pi / T);
        }
    return s;
}

}  // namespace

TEST_CASE("projection reproduces kernel elements") {
    const KernelBasis b = basis_of("symgrad", 2);
    const KernelProjector p(b, Eigen::Vector2d(0.3, -0.2), 0.4);
    for (std::size_t i = 0; i < b.fields.size(); ++i) {
        const auto& q = b.fields[i];
        const FieldFn f = [&](const Point& x, std::span<double> out) {
            q.evaluate(Eigen::VectorXd((x - p.center()) / p.radius()), out);
        };
        const Eigen::VectorXd coef = p.coefficients(f);
        for (Eigen::Index k = 0; k < coef.size(); ++k)
            CHECK(std::abs(coef[k] - (static_cast<std::size_t>(k) == i ? 1.0 : 0.0)) < 1e-6);
    }
}

TEST_CASE("projection of a field orthogonal to the kernel vanishes") {
    const KernelBasis b = basis_of("symgrad", 2);
    const KernelProjector p(b, Eigen::Vector2d::Zero(), 1.0);
    FourierField f(2, 2, 9);
    // Remove the projection once; the residual is orthogonal in the discrete Gram.
    const PolynomialVectorField pf = p.project(f.function());
    const FieldFn residual = [&](const Point& x, std::span<double> out) {
        f.evaluate(x, out);
        const Eigen::VectorXd q = pf.evaluate(Eigen::VectorXd(x));
        for (int j = 0; j < 2; ++j) out[j] -= q[j];
    };
    CHECK(p.coefficients(residual).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("gradient projection of x1^2 is its mean") {
    const KernelBasis b = basis_of("gradient", 2, 1);
    const KernelProjector p(b, Eigen::Vector2d::Zero(), 1.0, 64);
    const PolynomialVectorField q = p.project([](const Point& x, std::span<double> out) { out[0] = x[0] * x[0]; });
    // <x1^2>_B = (pi / 4) / pi.
    CHECK(q.evaluate(Eigen::Vector2d(0.3, 0.4))[0] == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(q.evaluate(Eigen::Vector2d(-0.5, 0.1))[0] == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("inverse estimate constants") {
    const KernelProjector g(basis_of("gradient", 2, 1), Eigen::Vector2d::Zero(), 1.0);
    CHECK(inverse_estimate_constant(g, 20) == doctest::Approx(1.0).epsilon(1e-9));

    const KernelBasis s = basis_of("symgrad", 2);
    const double c1 = inverse_estimate_constant(KernelProjector(s, Eigen::Vector2d::Zero(), 1.0), 50, 4);
    const double c2 = inverse_estimate_constant(KernelProjector(s, Eigen::Vector2d(2.0, 1.0), 0.125), 50, 4);
    CHECK(std::isfinite(c1));
    CHECK(c1 > 1.0);
    CHECK(c1 == doctest::Approx(c2).epsilon(1e-6));
}

TEST_CASE("inverse estimate grows with the truncation degree for devsymgrad") {
    const Operator op = builtin("devsymgrad", 2);
    double previous = 0.0;
    for (int d : {1, 3, 5}) {
        const double c = inverse_estimate_constant(KernelProjector(kernel_basis(op, d), Eigen::Vector2d::Zero(), 1.0), 200, 2);
        CHECK(c > previous);
        previous = c;
    }
}

TEST_CASE("Poincare ratio for x1^2 on the unit disk") {
    const Operator op = builtin("gradient", 2, 1);
    const KernelProjector p(basis_of("gradient", 2, 1), Eigen::Vector2d::Zero(), 1.0, 64);
    const Grid g = Grid::cube(2, -1.05, 1.05, 420);
    const DiscreteField u = DiscreteField::sample(g, 1, [](const Point& x, std::span<double> out) { out[0] = x[0] * x[0]; });
    const PoincareRatio pr = poincare_ratio(op, p, u);
    const double num = disk_integral([](double x, double) { return std::abs(x * x - 0.25); });
    const double den = 2.0 * disk_integral([](double x, double) { return std::abs(2.0 * x); });
    CHECK(pr.value == doctest::Approx(num / den).epsilon(0.02));
    CHECK_FALSE(pr.kernel);
}

TEST_CASE("Poincare ratio is dilation invariant") {
    const Operator op = builtin("symgrad", 2);
    const KernelBasis b = basis_of("symgrad", 2);
    FourierField f(2, 2, 21);
    std::vector<double> ratios;
    for (double r : {1.0, 0.25}) {
        const KernelProjector p(b, Eigen::Vector2d::Zero(), r);
        const Grid g = Grid::cube(2, -1.1 * r, 1.1 * r, 88);
        const DiscreteField u = DiscreteField::sample(g, 2, [&](const Point& x, std::span<double> out) {
            const Point y = x / r;
            f.evaluate(y, out);
        });
        ratios.push_back(poincare_ratio(op, p, u).value);
    }
    CHECK(ratios[0] == doctest::Approx(ratios[1]).epsilon(0.02));
}

TEST_CASE("kernel fields are flagged") {
    const Operator op = builtin("symgrad", 2);
    const KernelProjector p(basis_of("symgrad", 2), Eigen::Vector2d::Zero(), 1.0);
    const Grid g = Grid::cube(2, -1.1, 1.1, 64);
    const DiscreteField u = DiscreteField::sample(g, 2, [](const Point& x, std::span<double> out) {
        out[0] = 0.5 - x[1];
        out[1] = x[0];
    });
    const PoincareRatio pr = poincare_ratio(op, p, u);
    CHECK(pr.kernel);
    CHECK(pr.numerator < 1e-10);
}

TEST_CASE("zero extension ratio") {
    const Operator op = builtin("gradient", 2, 1);
    const Grid g = Grid::cube(2, -1.1, 1.1, 110);
    const Ball inner{Eigen::Vector2d::Zero(), 0.3}, outer{Eigen::Vector2d::Zero(), 1.0};
    const PoincareRatio zero = poincare_zero_extension(op, inner, outer, DiscreteField(g, 1));
    CHECK(zero.kernel);
    CHECK(zero.numerator == 0.0);

    const DiscreteField bump = DiscreteField::sample(g, 1, [](const Point& x, std::span<double> out) {
        const double r = x.norm();
        out[0] = r > 0.4 && r < 0.9 ? std::pow(std::sin(std::numbers::pi * (r - 0.4) / 0.5), 2) : 0.0;
    });
    const PoincareRatio pr = poincare_zero_extension(op, inner, outer, bump);
    CHECK(pr.value > 0.0);
    CHECK(pr.value < 1.0);
}
