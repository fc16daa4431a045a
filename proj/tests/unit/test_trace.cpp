#include <doctest.h>

#include "bva/domain.hpp"
#include "bva/error.hpp"
#include "bva/nullspace.hpp"
#include "bva/operator.hpp"
#include "bva/projection.hpp"
#include "bva/solver.hpp"
#include "bva/trace.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace bva;

namespace {

const Domain kDisk = Domain::disk(Eigen::Vector2d(0.0, 0.0), 1.0);

DiscreteField constant_field(const Grid& g, std::vector<double> c) {
    return DiscreteField::sample(g, static_cast<int>(c.size()), [&](const Point&, std::span<double> out) {
        for (std::size_t j = 0; j < c.size(); ++j) out[j] = c[j];
    });
}

}  // namespace

TEST_CASE("reflected balls keep their clearance") {
    const WhitneyCover cover(kDisk, 4);
    CHECK(cover.min_clearance_ratio() >= 1.0);
    for (const auto& b : cover.balls()) CHECK(kDisk.signed_distance(b.reflected_center) < -cover.reflected_radius());
}

TEST_CASE("cover multiplicity on the square") {
    const Domain sq = load_domain("square");
    const WhitneyCover cover(sq, 5);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    int worst = 0;
    for (int k = 0; k < 2000; ++k) {
        Point x(2);
        x << unif(rng), unif(rng);
        worst = std::max(worst, cover.multiplicity(x));
    }
    CHECK(worst <= 8);
}

TEST_CASE("partition of unity on the boundary strip") {
    const WhitneyCover cover(kDisk, 4);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> depth(0.0, 0.9 * cover.strip_width()), angle(0.0, 2.0 * std::numbers::pi);
    std::vector<std::pair<std::size_t, double>> w;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double r = 1.0 - depth(rng), t = angle(rng);
        Point x(2);
        x << r * std::cos(t), r * std::sin(t);
        cover.partition(x, w);
        double s = 0.0;
        for (const auto& [i, v] : w) s += v;
        worst = std::max(worst, std::abs(s - 1.0));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("levels below the coarsest are rejected") {
    CHECK_THROWS_AS(WhitneyCover(kDisk, kDisk.coarsest_level() - 1), DomainError);
}

TEST_CASE("T_j reproduces constants") {
    const Operator op = builtin("symgrad", 2);
    const Grid g = solver_grid(kDisk, 64, 4);
    const DiscreteField u = constant_field(g, {1.5, -0.5});
    const KernelBasis b = trace_kernel(op);
    const DiscreteField Tu = apply_Tj(op, WhitneyCover(kDisk, 4), u, b);
    double worst = 0.0;
    for (std::size_t i = 0; i < u.values().size(); ++i) worst = std::max(worst, std::abs(Tu.values()[i] - u.values()[i]));
    CHECK(worst < 1e-12);
}

TEST_CASE("T_j u approaches u for smooth u") {
    const Operator op = builtin("gradient", 2, 1);
    const Grid g = solver_grid(kDisk, 128, 4);
    const DiscreteField u = DiscreteField::sample(g, 1, [](const Point& x, std::span<double> out) {
        out[0] = std::sin(2.0 * x[0]) + x[1] * x[1];
    });
    const KernelBasis b = trace_kernel(op);
    const auto mask = kDisk.cell_mask(g);
    double previous = std::numeric_limits<double>::infinity();
    for (int j = 3; j <= 6; ++j) {
        const DiscreteField d = apply_Tj(op, WhitneyCover(kDisk, j), u, b) - u;
        const double e = d.l1_norm(mask);
        CHECK(e < previous);
        previous = e;
    }
}

TEST_CASE("trace of a constant is that constant at every level") {
    const Operator op = builtin("gradient", 2, 2);
    const Grid g = solver_grid(kDisk, 64, 4);
    const TraceResult t = compute_trace(op, kDisk, constant_field(g, {0.75, -2.0}));
    REQUIRE(t.level_values.size() >= 2);
    for (const auto& v : t.level_values) {
        CHECK((v.row(0).array() - 0.75).abs().maxCoeff() < 1e-12);
        CHECK((v.row(1).array() + 2.0).abs().maxCoeff() < 1e-12);
    }
    CHECK(t.converged);
}

TEST_CASE("trace level differences against the strip variation") {
    const Operator op = builtin("symgrad", 2);
    const Grid g = solver_grid(kDisk, 128, 4);
    const DiscreteField u = DiscreteField::sample(g, 2, [](const Point& x, std::span<double> out) {
        out[0] = std::sin(x[0] + 2.0 * x[1]);
        out[1] = x[0] * x[0] - x[1];
    });
    const TraceResult t = compute_trace(op, kDisk, u);
    REQUIRE(t.strip_variation.size() == t.per_level_l1_diffs.size());
    for (std::size_t i = 0; i < t.per_level_l1_diffs.size(); ++i) {
        REQUIRE(t.strip_variation[i] > 0.0);
        const double c = t.per_level_l1_diffs[i] / t.strip_variation[i];
        CHECK(c < 10.0);
    }
}

TEST_CASE("Gauss-Green with compactly supported fields") {
    const Operator op = builtin("gradient", 2, 1);
    auto bump = [](const Point& x) {
        const double r2 = x.squaredNorm() / 0.49;
        return r2 < 1.0 ? std::pow(1.0 - r2, 4) : 0.0;
    };
    const FieldFn phi = [&](const Point& x, std::span<double> out) {
        out[0] = bump(x) * (1.0 + x[1]);
        out[1] = bump(x) * (x[0] + 0.5);
    };
    std::vector<double> residual;
    for (int cells : {64, 128}) {
        const Grid g = solver_grid(kDisk, cells, 4);
        const DiscreteField u = DiscreteField::sample(g, 1, [&](const Point& x, std::span<double> out) {
            out[0] = bump(x) * std::cos(x[0] + 0.3 * x[1]) * std::exp(x[1] / 3.0);
        });
        const GaussGreen gg = gauss_green_residual(op, kDisk, u, phi);
        CHECK(std::abs(gg.boundary) < 1e-12);
        residual.push_back(gg.residual);
    }
    CHECK(residual[1] < residual[0]);
    CHECK(residual[1] < 1e-2);
}

TEST_CASE("Gauss-Green for u = x1 on the disk") {
    const Operator op = builtin("gradient", 2, 1);
    const FieldFn phi = [](const Point&, std::span<double> out) {
        out[0] = 1.0;
        out[1] = 0.0;
    };
    std::vector<double> residual;
    for (int cells : {64, 128}) {
        const Grid g = solver_grid(kDisk, cells, 4);
        const DiscreteField u = DiscreteField::sample(g, 1, [](const Point& x, std::span<double> out) { out[0] = x[0]; });
        const GaussGreen gg = gauss_green_residual(op, kDisk, u, phi);
        // int d1 x1 = pi, A* phi = 0, int x1 nu_1 = pi.
        CHECK(gg.bulk_derivative == doctest::Approx(std::numbers::pi).epsilon(0.02));
        CHECK(std::abs(gg.bulk_adjoint) < 1e-9);
        CHECK(gg.boundary == doctest::Approx(std::numbers::pi).epsilon(0.02));
        residual.push_back(gg.residual);
    }
    CHECK(residual[1] < 5e-2);
    CHECK(residual[1] < residual[0]);
}

TEST_CASE("Gauss-Green for a kernel element") {
    const Operator op = builtin("symgrad", 2);
    const Grid g = solver_grid(kDisk, 128, 4);
    const DiscreteField u = DiscreteField::sample(g, 2, [](const Point& x, std::span<double> out) {
        out[0] = 1.0 - x[1];
        out[1] = x[0];
    });
    const FieldFn phi = [](const Point& x, std::span<double> out) {
        out[0] = x[0];
        out[1] = x[1] * x[1];
        out[2] = x[1] * x[1];
        out[3] = 1.0 + x[0] * x[1];
    };
    const GaussGreen gg = gauss_green_residual(op, kDisk, u, phi);
    CHECK(std::abs(gg.bulk_derivative) < 1e-12);
    CHECK(gg.residual < 5e-2);
}

TEST_CASE("gluing") {
    const Operator op = builtin("gradient", 2, 1);
    const Domain inner = Domain::disk(Eigen::Vector2d(0.0, 0.0), 0.5);
    std::vector<double> mass;
    for (int cells : {64, 128}) {
        const Grid g = solver_grid(kDisk, cells, 4);
        const DiscreteField smooth = DiscreteField::sample(g, 1, [](const Point& x, std::span<double> out) {
            out[0] = std::cos(x[0]) + x[1];
        });
        mass.push_back(gluing_jump(op, inner, kDisk, smooth, smooth).jump_mass);
    }
    CHECK(mass[1] < 0.75 * mass[0]);
    CHECK(mass[1] < 2e-2);

    const Grid g = solver_grid(kDisk, 128, 4);

    const GluingResult r = gluing_jump(op, inner, kDisk, DiscreteField(g, 1), constant_field(g, {2.0}));
    CHECK(r.jump_mass == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-6));
    for (Eigen::Index m = 0; m < r.jump.cols(); ++m) {
        const Eigen::VectorXd expect = 2.0 * r.mesh.normals.col(m);
        CHECK((r.jump.col(m) - expect).norm() < 1e-9);
    }
}

TEST_CASE("gluing jump of the symmetric gradient is the symmetrised product") {
    const Operator op = builtin("symgrad", 2);
    const Domain inner = Domain::disk(Eigen::Vector2d(0.0, 0.0), 0.5);
    const Grid g = solver_grid(kDisk, 64, 4);
    const Eigen::Vector2d c(1.0, -0.5);
    const GluingResult r = gluing_jump(op, inner, kDisk, DiscreteField(g, 2), constant_field(g, {c[0], c[1]}));
    for (Eigen::Index m = 0; m < r.jump.cols(); ++m) {
        const Eigen::Vector2d nu = r.mesh.normals.col(m);
        Eigen::Vector4d expect;
        expect << c[0] * nu[0], 0.5 * (c[0] * nu[1] + c[1] * nu[0]), 0.5 * (c[0] * nu[1] + c[1] * nu[0]), c[1] * nu[1];
        CHECK((r.jump.col(m) - Eigen::VectorXd(expect)).norm() < 1e-9);
    }
}

TEST_CASE("zero trace") {
    const Operator op = builtin("gradient", 2, 1);
    const Grid g = solver_grid(kDisk, 64, 4);
    const DiscreteField bump = DiscreteField::sample(g, 1, [](const Point& x, std::span<double> out) {
        const double r2 = x.squaredNorm() / 0.36;
        out[0] = r2 < 1.0 ? std::pow(1.0 - r2, 3) : 0.0;
    });
    CHECK(zero_trace_check(op, kDisk, bump).zero);

    const ZeroTrace one = zero_trace_check(op, kDisk, constant_field(g, {1.0}));
    CHECK_FALSE(one.zero);
    CHECK(one.trace_l1 == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-6));
}

TEST_CASE("cutting off near the boundary keeps a zero trace") {
    const Operator op = builtin("gradient", 2, 1);
    // The zero band 2^-(m+1) must span at least two cells.
    const Grid g = solver_grid(kDisk, 256, 16);
    const DiscreteField w = DiscreteField::sample(g, 1, [](const Point& x, std::span<double> out) {
        out[0] = std::max(0.0, 1.0 - x.squaredNorm()) * (1.0 + x[0]);
    });
    for (int m = 3; m <= 5; ++m) {
        const WhitneyCover cover(kDisk, m);
        const DiscreteField cut = DiscreteField::sample(g, 1, [&](const Point& x, std::span<double> out) {
            double v = 0.0;
            w.interpolate(x, std::span<double>(&v, 1));
            out[0] = (1.0 - cover.cutoff(x)) * v;
        });
        const ZeroTrace z = zero_trace_check(op, kDisk, cut);
        CHECK(z.zero);
    }
}
