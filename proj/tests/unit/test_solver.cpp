#include <doctest.h>

#include "bva/error.hpp"
#include "bva/solver.hpp"

#include <cmath>
#include <numbers>

using namespace bva;

namespace {

DirichletProblem box_problem(Integrand f, FieldFn u0, int cells) {
    DirichletProblem dp;
    dp.op = builtin("gradient", 2, 1);
    dp.domain = Domain::box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0));
    dp.integrand = std::move(f);
    dp.u0 = std::move(u0);
    dp.grid = solver_grid(dp.domain, cells, dp.options.ring);
    return dp;
}

FieldFn constant(double c) {
    return [c](const Point&, std::span<double> out) { out[0] = c; };
}

}  // namespace

TEST_CASE("solver grid layout") {
    const Domain d = Domain::box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(2.0, 1.0));
    const Grid g = solver_grid(d, 32, 8);
    CHECK(g.spacing() == doctest::Approx(2.0 / 32));
    CHECK(g.cells(0) == 48);
    CHECK(g.cells(1) == 32);
}

TEST_CASE("energy at the datum has no boundary term") {
    const DirichletProblem dp = box_problem(Integrand::area(), [](const Point& x, std::span<double> out) {
        out[0] = 0.5 * x[0] + 0.25 * x[1] * x[1];
    }, 64);
    const Energy e = energy(dp, DiscreteField::sample(dp.grid, 1, dp.u0));
    CHECK(std::abs(e.boundary_trace) < 1e-10);
    // The ring term only carries the stencil mismatch at the boundary.
    CHECK(std::abs(e.boundary_ring) < 1e-3);
    // int_0^1 int_0^1 sqrt(1 + 1/4 + y^2 / 4) dx dy.
    double exact = 0.0;
    for (int i = 0; i < 4000; ++i) {
        const double y = (i + 0.5) / 4000.0;
        exact += std::sqrt(1.25 + 0.25 * y * y) / 4000.0;
    }
    CHECK(e.bulk == doctest::Approx(exact).epsilon(2e-3));
}

TEST_CASE("jump energy against a constant datum is the perimeter") {
    const DirichletProblem dp = box_problem(Integrand::tv(), constant(1.0), 64);
    const Energy e = energy(dp, DiscreteField(dp.grid, 1));
    CHECK(e.bulk == doctest::Approx(0.0));
    CHECK(e.boundary_trace == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(e.total == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(e.discrete == doctest::Approx(4.0).epsilon(0.02));
}

TEST_CASE("area energy of a constant is the area") {
    const DirichletProblem dp = box_problem(Integrand::area(), constant(0.3), 32);
    const Energy e = energy(dp, DiscreteField::sample(dp.grid, 1, dp.u0));
    CHECK(e.total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("constant data are minimisers") {
    DirichletProblem dp = box_problem(Integrand::area(), constant(-0.4), 32);
    const MinimizeResult r = minimize(dp);
    CHECK(r.energy == doctest::Approx(1.0).epsilon(1e-2));
    double worst = 0.0;
    const auto inside = dp.domain.cell_mask(dp.grid);
    for (std::size_t c = 0; c < dp.grid.size(); ++c)
        if (inside[c]) worst = std::max(worst, std::abs(r.u.at(c)[0] + 0.4));
    CHECK(worst < 1e-2);
}

TEST_CASE("least-gradient connection across the box") {
    DirichletProblem dp = box_problem(Integrand::tv(), [](const Point& x, std::span<double> out) { out[0] = x[0]; }, 64);
    const MinimizeResult r = minimize(dp);
    CHECK(r.converged);
    CHECK(r.energy == doctest::Approx(1.0).epsilon(0.02));
    for (std::size_t i = 1; i < r.energy_trace.size(); ++i) CHECK(r.energy_trace[i] <= r.energy_trace[i - 1]);
    CHECK(r.tau * r.sigma * r.operator_norm * r.operator_norm < 1.0);
}

TEST_CASE("kernel datum gap vanishes") {
    DirichletProblem dp;
    dp.op = builtin("symgrad", 2);
    dp.domain = Domain::disk(Eigen::Vector2d(0.0, 0.0), 1.0);
    dp.integrand = Integrand::area();
    dp.u0 = [](const Point& x, std::span<double> out) {
        out[0] = 0.2 - x[1];
        out[1] = x[0];
    };
    dp.options.tolerance = 1e-12;
    dp.grid = solver_grid(dp.domain, 32, dp.options.ring);
    const ConsistencyGap g = consistency_gap(dp);
    CHECK(std::abs(g.gap) < 1e-6);
}

TEST_CASE("disk with a cos theta datum") {
    DirichletProblem dp;
    dp.op = builtin("gradient", 2, 1);
    dp.domain = Domain::disk(Eigen::Vector2d(0.0, 0.0), 1.0);
    dp.integrand = Integrand::tv();
    dp.u0 = [](const Point& x, std::span<double> out) { out[0] = x[0] / std::max(x.norm(), 1e-12); };
    std::vector<double> gaps;
    for (int cells : {32, 64}) {
        dp.grid = solver_grid(dp.domain, cells, dp.options.ring);
        const ConsistencyGap g = consistency_gap(dp);
        CHECK(std::isfinite(g.min_relaxed));
        CHECK(std::isfinite(g.inf_constrained));
        gaps.push_back(g.gap);
    }
    CHECK(gaps[1] < gaps[0]);
}

TEST_CASE("non-convex integrands are rejected") {
    DirichletProblem dp = box_problem(Integrand::truncated_concave(), constant(0.0), 16);
    CHECK_THROWS_AS(minimize(dp), DomainError);
}

TEST_CASE("quasiconvexity probe") {
    const Operator op = builtin("symgrad", 2);
    const Eigen::Vector4d A(0.5, -0.2, -0.2, 1.0);
    CHECK(quasiconvexity_probe(op, Integrand::tv(), A, 20).passed);
    CHECK(quasiconvexity_probe(op, Integrand::area(), A, 20).passed);
    const QuasiconvexityProbe p = quasiconvexity_probe(op, Integrand::truncated_concave(), Eigen::Vector4d::Zero(), 20);
    CHECK_FALSE(p.passed);
    REQUIRE(p.witness.has_value());
    CHECK(p.witness->rhs < p.witness->lhs);
}
