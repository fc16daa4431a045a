// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run all criteria
//   acceptance 5 7        run the listed criteria

#include "bva/counterexample.hpp"
#include "bva/domain.hpp"
#include "bva/ellipticity.hpp"
#include "bva/error.hpp"
#include "bva/fields.hpp"
#include "bva/integrand.hpp"
#include "bva/nullspace.hpp"
#include "bva/operator.hpp"
#include "bva/projection.hpp"
#include "bva/report.hpp"
#include "bva/solver.hpp"
#include "bva/trace.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace {

using namespace bva;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [FAILED: " << what << "]";
        }
    }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// 1. Ellipticity truth table.
Outcome criterion1() {
    Outcome o;
    const auto t0 = Clock::now();
    struct Row {
        std::string name;
        int n;
        bool r, c;
    };
    const std::vector<Row> rows{{"gradient", 2, true, true},   {"gradient", 3, true, true},
                                {"symgrad", 2, true, true},    {"symgrad", 3, true, true},
                                {"devsymgrad", 2, true, false}, {"devsymgrad", 3, true, true},
                                {"remark25", 3, true, false}};
    for (const auto& row : rows) {
        const Operator op = builtin(row.name, row.n);
        const EllipticityReport e = classify(op);
        o.detail << ' ' << row.name << row.n << ":R" << (e.r_elliptic ? "+" : "-") << "C" << (e.c_elliptic ? "+" : "-");
        o.require(e.r_elliptic == row.r && e.c_elliptic == row.c, row.name + " n=" + std::to_string(row.n) + " verdict");
        if (row.name == "remark25") {
            o.detail << (e.cancelling ? "cancel+" : "cancel-");
            o.require(e.cancelling, "remark25 cancelling");
        }
    }
    const Operator dev = builtin("devsymgrad", 2);
    Eigen::VectorXcd xi(2), eta(2);
    xi << 1.0, std::complex<double>(0.0, 1.0);
    eta << 1.0, std::complex<double>(0.0, -1.0);
    const double residual = (dev.symbol(xi) * eta).norm();
    o.detail << " |A[(1,i)](1,-i)|=" << residual;
    o.require(residual <= 1e-10, "devsymgrad witness residual");
    const double t = seconds_since(t0);
    o.detail << " time=" << t << "s";
    o.require(t < 30.0, "runtime < 30 s");
    return o;
}

// 2. Kernel dimensions.
Outcome criterion2() {
    Outcome o;
    auto check = [&](const std::string& name, int n, int N, int expect) {
        const Operator op = builtin(name, n, N);
        const KernelBasis b = kernel_basis(op, default_cutoff(op));
        o.detail << ' ' << name << n << "=" << b.dimension();
        o.require(b.dimension() == expect && b.minimal_l.has_value(), name + " dimension");
        o.require(b.max_residual(op) <= 1e-10, name + " residual");
    };
    check("gradient", 2, 1, 1);
    check("gradient", 2, 3, 3);
    check("gradient", 3, 2, 2);
    check("symgrad", 2, 0, 3);
    check("symgrad", 3, 0, 6);

    const Operator dev2 = builtin("devsymgrad", 2);
    const KernelBasis b2 = kernel_basis(dev2, 6);
    bool all_two = b2.dimension_by_degree.size() == 7;
    for (int d : b2.dimension_by_degree) all_two = all_two && d == 2;
    o.detail << " devsymgrad2 by degree=";
    for (int d : b2.dimension_by_degree) o.detail << d;
    o.require(all_two && !b2.minimal_l, "devsymgrad n=2 dimension 2 in every degree 0..6");
    o.require(b2.max_residual(dev2) <= 1e-10, "devsymgrad n=2 residual");

    const Operator dev3 = builtin("devsymgrad", 3);
    const KernelBasis b3 = kernel_basis(dev3, default_cutoff(dev3));
    o.detail << " devsymgrad3: l=" << (b3.minimal_l ? std::to_string(*b3.minimal_l) : "none")
             << " dim=" << b3.dimension() << " (parametrization count 9"
             << (b3.dimension() == 9 ? ", agrees)" : ", differs)");
    o.require(b3.minimal_l == 2, "devsymgrad n=3 stabilizes at l=2");
    o.require(b3.max_residual(dev3) <= 1e-10, "devsymgrad n=3 residual");
    return o;
}

double ball_l1(const BallQuadrature& q, const Eigen::VectorXd& c, double r,
               const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f) {
    double s = 0.0;
    const double scale = std::pow(r, static_cast<double>(c.size()));
    for (Eigen::Index k = 0; k < q.points().cols(); ++k) {
        const Eigen::VectorXd x = c + r * q.points().col(k);
        s += q.weights()[k] * scale * f(x).norm();
    }
    return s;
}

// 3. Averaged Taylor commutation.
Outcome criterion3() {
    Outcome o;
    double worst = 0.0;
    for (const auto& [name, n] : std::vector<std::pair<std::string, int>>{{"symgrad", 2}, {"gradient", 2}}) {
        const Operator op = builtin(name, n);
        const int l = 2;
        const Eigen::VectorXd c = Eigen::VectorXd::Constant(n, 0.1);
        const double r = 0.7;
        const AveragedTaylor Pl(n, c, r, l, 64), Pl1(n, c, r, l - 1, 64, Pl.weight_exponent());
        const auto fields = random_fields(n, op.N(), 10, 2024);
        for (const auto& f : fields) {
            const PolynomialVectorField p = Pl.apply(f.function(), op.N());
            const PolynomialVectorField Ap = p.apply(op);
            const PolynomialVectorField pA = Pl1.apply(
                [&](const Point& x, std::span<double> out) {
                    const Eigen::VectorXd v = f.apply(op, x);
                    for (int k = 0; k < op.K(); ++k) out[k] = v[k];
                },
                op.K());
            const double diff =
                ball_l1(Pl.quadrature(), c, r, [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(Ap.evaluate(x) - pA.evaluate(x)); });
            const double Au = ball_l1(Pl.quadrature(), c, r, [&](const Eigen::VectorXd& x) {
                Point y = x;
                return f.apply(op, y);
            });
            worst = std::max(worst, diff / Au);
        }
    }
    o.detail << " max ||A P^l u - P^(l-1) A u|| / ||A u|| = " << worst;
    o.require(worst <= 1e-2, "commutation defect <= 1e-2");
    return o;
}

// 4. Poincare ratios, dilation invariance.
Outcome criterion4() {
    Outcome o;
    const Operator op = builtin("symgrad", 2);
    const KernelBasis b = kernel_basis(op, default_cutoff(op));
    const auto family = random_fields(2, 2, 50, 7);
    const int cells = 32;
    std::vector<double> maxima;
    for (double rad : {1.0, 0.5, 0.25}) {
        const KernelProjector p(b, Eigen::VectorXd::Zero(2), rad);
        const Grid g = Grid::cube(2, -rad * 1.0625, rad * 1.0625, static_cast<int>(2.125 * cells));
        double worst = 0.0;
        for (const auto& f : family) {
            const DiscreteField u = DiscreteField::sample(g, 2, [&](const Point& x, std::span<double> out) {
                const Point y = x / rad;
                f.evaluate(y, out);
            });
            const PoincareRatio pr = poincare_ratio(op, p, u);
            worst = std::max(worst, pr.value);
        }
        maxima.push_back(worst);
        o.detail << " r=" << rad << ":" << worst;
    }
    const double hi = *std::max_element(maxima.begin(), maxima.end());
    const double lo = *std::min_element(maxima.begin(), maxima.end());
    const double spread = (hi - lo) / hi;
    o.detail << " spread=" << spread;
    o.require(std::isfinite(hi) && hi > 0.0, "finite ratio");
    o.require(spread <= 0.02, "dilation invariance within 2%");
    return o;
}

// 5. Trace convergence for u = x1 on the unit disk.
Outcome criterion5() {
    Outcome o;
    const Operator op = builtin("gradient", 2);
    const Domain disk = Domain::disk({0.0, 0.0}, 1.0);
    const Grid g = solver_grid(disk, 256, 4);
    const DiscreteField u = DiscreteField::sample(g, 1, [](const Point& x, std::span<double> out) { out[0] = x[0]; });
    TraceOptions opts;
    opts.j_min = 4;
    opts.j_max = 7;
    const TraceResult t = compute_trace(op, disk, u, opts);
    std::vector<double> sup, l1;
    for (const auto& vals : t.level_values) {
        double s = 0.0, a = 0.0;
        for (std::size_t m = 0; m < t.mesh.size(); ++m) {
            const auto mi = static_cast<Eigen::Index>(m);
            const double exact = t.mesh.points(0, mi);
            const double e = std::abs(vals(0, mi) - exact);
            s = std::max(s, e);
            a += t.mesh.weights[mi] * e;
        }
        sup.push_back(s);
        l1.push_back(a);
    }
    o.detail << " sup errors:";
    for (double s : sup) o.detail << ' ' << s;
    o.detail << " final L1=" << l1.back() << " diffs:";
    for (double d : t.per_level_l1_diffs) o.detail << ' ' << d;
    for (std::size_t i = 1; i < sup.size(); ++i) o.require(sup[i] < sup[i - 1], "sup error decreasing");
    o.require(l1.back() < 1e-2, "final L1 error < 1e-2");
    // Ratios D_j / D_{j+1} for j >= j0 + 1.
    for (std::size_t i = 1; i + 1 < t.per_level_l1_diffs.size(); ++i) {
        const double ratio = t.per_level_l1_diffs[i] / t.per_level_l1_diffs[i + 1];
        o.detail << " ratio" << t.levels[i] << "=" << ratio;
        o.require(ratio >= 1.5, "Cauchy difference decrease factor >= 1.5");
    }
    return o;
}

// 6. T_j fixes the kernel of symgrad n=2.
Outcome criterion6() {
    Outcome o;
    const Operator op = builtin("symgrad", 2);
    const Domain disk = Domain::disk({0.0, 0.0}, 1.0);
    const KernelBasis b = trace_kernel(op);
    const Grid g = solver_grid(disk, 128, 4);
    const KernelProjector unit(b, Eigen::VectorXd::Zero(2), 1.0, 8);
    double worst = 0.0;
    for (const auto& q : b.fields) {
        // Rescale the unit-ball basis field to the disk frame by sampling.
        const DiscreteField u = DiscreteField::sample(g, 2, [&](const Point& x, std::span<double> out) {
            q.evaluate(Eigen::VectorXd(x), out);
        });
        for (int j = disk.coarsest_level(); j <= finest_level(g); ++j) {
            const WhitneyCover cover(disk, j);
            const TjEvaluator T(cover, unit, u);
            std::vector<double> val(2);
            for (std::size_t c = 0; c < g.size(); c += 7) {
                const Point x = g.center(c);
                if (!disk.contains(x)) continue;
                T.evaluate(x, val);
                const Eigen::VectorXd exact = q.evaluate(Eigen::VectorXd(x));
                worst = std::max(worst, std::hypot(val[0] - exact[0], val[1] - exact[1]));
            }
            const BoundaryMesh mesh = disk.boundary_mesh(cover.radius() / 4);
            for (std::size_t m = 0; m < mesh.size(); ++m) {
                const Point x = mesh.points.col(static_cast<Eigen::Index>(m));
                T.smoothed(x, val);
                const Eigen::VectorXd exact = q.evaluate(Eigen::VectorXd(x));
                worst = std::max(worst, std::hypot(val[0] - exact[0], val[1] - exact[1]));
            }
        }
    }
    o.detail << " max |T_j q - q| = " << worst;
    o.require(worst <= 1e-6, "kernel fixed to 1e-6");
    return o;
}

// 7. No-trace counterexample, devsymgrad n=2.
Outcome criterion7() {
    Outcome o;
    const CounterexampleTable t = no_trace_counterexample(CounterexampleVariant::RNotC, {1e-1, 1e-2, 1e-3}, 512, 0.1);
    double lo = t.rows[0].interior_l1, hi = lo;
    for (const auto& r : t.rows) {
        lo = std::min(lo, r.interior_l1);
        hi = std::max(hi, r.interior_l1);
    }
    const double variation = (hi - lo) / hi;
    o.detail << " interior L1:";
    for (const auto& r : t.rows) o.detail << ' ' << r.interior_l1;
    o.detail << " variation=" << variation << " line L1:";
    for (const auto& r : t.rows) o.detail << ' ' << r.line_l1;
    o.require(variation < 0.05, "interior L1 variation < 5%");
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        const double growth = t.rows[i].line_l1 / t.rows[i - 1].line_l1;
        o.detail << " growth=" << growth;
        o.require(growth >= 1.8, "line L1 growth >= 1.8 per decade");
    }
    o.detail << " discrete |A h_f| (|x|>0.1) centred=" << t.discrete_A_l1_centered
             << " forward=" << t.discrete_A_l1_forward;
    o.require(t.discrete_A_l1_centered < 1e-2, "discrete A h_f L1 < 1e-2");
    return o;
}

// 8. Gauss-Green residual order.
Outcome criterion8() {
    Outcome o;
    struct Pair {
        std::string op;
        std::string label;
        FieldFn u, phi;
    };
    auto scalar = [](std::function<double(const Point&)> f) {
        return FieldFn([f](const Point& x, std::span<double> out) { out[0] = f(x); });
    };
    auto vec2 = [](std::function<double(const Point&)> a, std::function<double(const Point&)> b) {
        return FieldFn([a, b](const Point& x, std::span<double> out) {
            out[0] = a(x);
            out[1] = b(x);
        });
    };
    auto vec4 = [](std::function<double(const Point&)> f) {
        return FieldFn([f](const Point& x, std::span<double> out) {
            out[0] = f(x);
            out[1] = 0.5 * x[0];
            out[2] = 0.5 * x[0];
            out[3] = f(x) * x[1];
        });
    };
    std::vector<Pair> pairs;
    pairs.push_back({"gradient", "log(2+x1)+x2^3,(1,x1)",
                     scalar([](const Point& x) { return std::log(2.0 + x[0]) + x[1] * x[1] * x[1]; }),
                     vec2([](const Point&) { return 1.0; }, [](const Point& x) { return x[0]; })});
    pairs.push_back({"gradient", "sin(x1+0.3)cos(x2-0.2)+x2,(1+x2,cos x1)",
                     scalar([](const Point& x) { return std::sin(x[0] + 0.3) * std::cos(x[1] - 0.2) + x[1]; }),
                     vec2([](const Point& x) { return 1.0 + x[1]; }, [](const Point& x) { return std::cos(x[0]); })});
    pairs.push_back({"gradient", "exp(x1/2+x2/5),(x1 x2+1/2,1-x1)",
                     scalar([](const Point& x) { return std::exp(0.5 * x[0] + 0.2 * x[1]); }),
                     vec2([](const Point& x) { return x[0] * x[1] + 0.5; }, [](const Point& x) { return 1.0 - x[0]; })});
    pairs.push_back({"symgrad", "(x1 x2, x1^2),phi4",
                     vec2([](const Point& x) { return x[0] * x[1]; }, [](const Point& x) { return x[0] * x[0]; }),
                     vec4([](const Point& x) { return 1.0 + x[1]; })});
    pairs.push_back({"symgrad", "(sin x2, cos x1),phi4",
                     vec2([](const Point& x) { return std::sin(x[1]); }, [](const Point& x) { return std::cos(x[0]); }),
                     vec4([](const Point& x) { return x[0]; })});

    const std::vector<std::pair<std::string, Domain>> domains{{"disk", Domain::disk({0.0, 0.0}, 1.0)},
                                                              {"square", load_domain("square")}};
    const std::vector<int> ladder{64, 128, 256};
    double worst_abs = 0.0, worst_order = std::numeric_limits<double>::infinity();
    for (const auto& [dname, dom] : domains) {
        for (const auto& p : pairs) {
            const Operator op = builtin(p.op, 2);
            std::vector<double> res;
            for (int cells : ladder) {
                const Grid g = solver_grid(dom, cells, 4);
                const DiscreteField u = DiscreteField::sample(g, op.N(), p.u);
                res.push_back(gauss_green_residual(op, dom, u, p.phi, {}, 1e-2).residual);
            }
            const double order = std::log2(res.front() / res.back()) / 2.0;
            worst_order = std::min(worst_order, order);
            worst_abs = std::max(worst_abs, res[1]);
            o.detail << ' ' << dname << '/' << p.op << ':' << res[0] << ',' << res[1] << ',' << res[2] << " p=" << order;
        }
    }
    o.require(worst_order >= 0.9, "residual order >= 0.9");
    o.require(worst_abs < 5e-2, "absolute residual < 5e-2 at 128");
    return o;
}

// 9. Gluing: characteristic function jump mass and dual pairing.
Outcome criterion9() {
    Outcome o;
    const Operator op = builtin("gradient", 2);
    const Domain inner = Domain::disk({0.0, 0.0}, 0.5);
    const Domain outer = Domain::disk({0.0, 0.0}, 1.0);
    auto run = [&](int cells) {
        const Grid g = solver_grid(outer, cells, 4);
        const DiscreteField u = DiscreteField::sample(g, 1, [](const Point&, std::span<double> out) { out[0] = 1.0; });
        const DiscreteField v(g, 1);
        return std::make_tuple(g, u, v, gluing_jump(op, inner, outer, u, v));
    };
    const double exact = 2.0 * std::numbers::pi * 0.5;
    const auto [g1, u1, v1, r1] = run(128);
    const double rel = std::abs(r1.jump_mass - exact) / exact;
    o.detail << " jump mass=" << r1.jump_mass << " exact=" << exact << " rel=" << rel;
    o.require(rel <= 0.02, "jump mass within 2%");

    const auto [g2, u2, v2, r2] = run(256);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst1 = 0.0, worst2 = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double a = normal(rng), b = normal(rng), c = normal(rng), w = 1.0 + std::abs(normal(rng));
        // Smooth test field vanishing outside radius 0.9.
        const FieldFn phi = [=](const Point& x, std::span<double> out) {
            const double r2 = x.squaredNorm() / 0.81;
            const double bump = r2 < 1.0 ? std::pow(1.0 - r2, 3) : 0.0;
            out[0] = bump * (a + b * std::sin(w * x[0]));
            out[1] = bump * (c + a * std::cos(w * x[1]));
        };
        worst1 = std::max(worst1, gluing_pairing_defect(op, r1, u1, v1, phi));
        worst2 = std::max(worst2, gluing_pairing_defect(op, r2, u2, v2, phi));
    }
    const double h1 = g1.spacing(), h2 = g2.spacing();
    o.detail << " pairing defect h=" << h1 << ":" << worst1 << " h=" << h2 << ":" << worst2;
    o.require(worst1 <= 10.0 * h1 && worst2 <= 10.0 * h2, "pairing defect <= 10 h");
    o.require(worst2 <= 0.75 * worst1, "pairing defect decreases with h");
    return o;
}

// 10. Solver.
Outcome criterion10() {
    Outcome o;
    DirichletProblem dp;
    dp.op = builtin("gradient", 2);
    dp.domain = Domain::box(Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(1.0, 1.0));
    dp.integrand = Integrand::tv();
    dp.u0 = [](const Point& x, std::span<double> out) { out[0] = x[0]; };
    double worst_time = 0.0;
    for (int cells : {128, 256}) {
        dp.grid = solver_grid(dp.domain, cells, dp.options.ring);
        const auto t0 = Clock::now();
        const ConsistencyGap cg = consistency_gap(dp);
        const double t = seconds_since(t0);
        if (cells == 128) worst_time = std::max(worst_time, t);
        o.detail << " grid" << cells << ": relaxed=" << cg.min_relaxed << " hard=" << cg.inf_constrained
                 << " gap=" << cg.gap << " t=" << t << "s";
        if (cells == 128) {
            o.require(std::abs(cg.min_relaxed - 1.0) <= 0.02, "least-gradient energy within 2% at 128");
            o.require(std::abs(cg.gap) < 0.03, "gap < 3% at 128");
        } else {
            o.require(std::abs(cg.gap) < 0.015, "gap < 1.5% at 256");
        }
        for (const MinimizeResult* m : {&cg.relaxed, &cg.constrained}) {
            for (std::size_t i = 1; i < m->energy_trace.size(); ++i)
                if (m->energy_trace[i] > m->energy_trace[i - 1] + 1e-10) {
                    o.require(false, "energy trace nonincreasing");
                    break;
                }
        }
    }

    DirichletProblem kd;
    kd.op = builtin("symgrad", 2);
    kd.domain = Domain::disk({0.0, 0.0}, 1.0);
    kd.integrand = Integrand::area();
    kd.u0 = [](const Point& x, std::span<double> out) {
        out[0] = -x[1] + 0.3;
        out[1] = x[0] + 0.1;
    };
    kd.options.tolerance = 1e-14;
    kd.grid = solver_grid(kd.domain, 64, kd.options.ring);
    const auto t0 = Clock::now();
    const MinimizeResult m = minimize(kd);
    const double t = seconds_since(t0);
    worst_time = std::max(worst_time, t);
    const DiscreteField U0 = DiscreteField::sample(kd.grid, 2, kd.u0);
    const auto inside = kd.domain.cell_mask(kd.grid);
    double dev = 0.0;
    for (std::size_t c = 0; c < kd.grid.size(); ++c)
        if (inside[c])
            for (int j = 0; j < 2; ++j) dev = std::max(dev, std::abs(m.u.at(c)[j] - U0.at(c)[j]));
    const Energy e = energy(kd, m.u);
    o.detail << " kernel datum: max|u-u0|=" << dev << " boundary=" << e.boundary_trace << " t=" << t << "s";
    o.require(dev <= 1e-6, "kernel datum reproduced to 1e-6");
    o.require(e.boundary_trace <= 1e-6, "kernel datum boundary penalty <= 1e-6");
    o.require(worst_time < 300.0, "runtime < 5 min per problem at 128");
    return o;
}

// 11. Quasiconvexity probe.
Outcome criterion11() {
    Outcome o;
    std::vector<double> tt{0.0}, gg{1.0};
    for (int k = -8; k <= 16; ++k) {
        const double t = std::ldexp(1.0, k);
        tt.push_back(t);
        gg.push_back(t + 1.0 / (1.0 + t));
    }
    const std::vector<std::pair<std::string, Integrand>> convex{
        {"tv", Integrand::tv()}, {"area", Integrand::area()}, {"table", Integrand::table(tt, gg)}};
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (const auto& [opname, n] : std::vector<std::pair<std::string, int>>{{"gradient", 2}, {"symgrad", 2}}) {
        const Operator op = builtin(opname, n);
        for (const auto& [name, g] : convex) {
            Eigen::VectorXd A(op.K());
            for (Eigen::Index k = 0; k < A.size(); ++k) A[k] = normal(rng);
            const QuasiconvexityProbe p = quasiconvexity_probe(op, g, A, 100, 3);
            o.detail << ' ' << opname << '/' << name << ':' << (p.passed ? "pass" : "fail") << "(" << p.trials << ")";
            o.require(p.passed && p.trials == 100, name + " passes 100 trials");
        }
    }
    const Operator op = builtin("gradient", 2);
    const QuasiconvexityProbe p =
        quasiconvexity_probe(op, Integrand::truncated_concave(4.0), Eigen::VectorXd::Zero(2), 100, 3);
    o.require(!p.passed && p.witness.has_value(), "concave control fails with a witness");
    if (p.witness)
        o.detail << " concave: trial " << p.witness->trial << " g(A)=" << p.witness->lhs
                 << " mean g(A+A phi)=" << p.witness->rhs;
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7, criterion8,
                                                         criterion9, criterion10, criterion11};
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
    if (selected.empty())
        for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);
    int failures = 0;
    for (int k : selected) {
        if (k < 1 || k > static_cast<int>(criteria.size())) {
            std::cerr << "no criterion " << k << '\n';
            return 2;
        }
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = criteria[k - 1]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [EXCEPTION: " << e.what() << "]";
        }
        std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << " (" << seconds_since(t0) << " s)"
                  << o.detail.str() << std::endl;
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
