#include "bva/counterexample.hpp"

#include "bva/error.hpp"
#include "bva/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace bva {

namespace {

constexpr int kPanelPoints = 20;

// Panels [a, b] refined geometrically towards `a`.
std::vector<std::pair<double, double>> graded(double a, double b, int levels) {
    std::vector<std::pair<double, double>> out;
    double hi = b;
    for (int k = 1; k <= levels; ++k) {
        const double lo = a + (b - a) * std::ldexp(1.0, -k);
        out.emplace_back(lo, hi);
        hi = lo;
    }
    out.emplace_back(a, hi);
    return out;
}

std::vector<std::pair<double, double>> radial_panels(double eps) {
    std::vector<std::pair<double, double>> out;
    double lo = eps;
    while (lo < 1.0) {
        const double hi = std::min(1.0, 2.0 * lo);
        out.emplace_back(lo, hi);
        lo = hi;
    }
    return out;
}

template <class F>
double integrate(const std::vector<std::pair<double, double>>& panels, const GaussRule& rule, F&& f) {
    double s = 0.0;
    for (const auto& [a, b] : panels)
        for (std::size_t i = 0; i < rule.nodes.size(); ++i)
            s += 0.5 * (b - a) * rule.weights[i] * f(0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i]);
    return s;
}

}  // namespace

CounterexampleVariant parse_variant(const std::string& name) {
    if (name == "r-not-c" || name == "R_not_C") return CounterexampleVariant::RNotC;
    if (name == "not-r" || name == "not_R_elliptic") return CounterexampleVariant::NotR;
    throw ParseError("unknown counterexample variant '" + name + "' (r-not-c, not-r)");
}

std::string variant_name(CounterexampleVariant v) {
    return v == CounterexampleVariant::RNotC ? "r-not-c" : "not-r";
}

Eigen::VectorXd counterexample_field(CounterexampleVariant v, const Eigen::Vector2d& x) {
    if (v == CounterexampleVariant::RNotC) {
        // 1/(x1 + i x2) = (x1 - i x2)/|x|^2, sigma(z) = Re z eta1 - Im z eta2 = (Re z, Im z).
        const double r2 = x.squaredNorm();
        return Eigen::Vector2d(x[0] / r2, -x[1] / r2);
    }
    Eigen::VectorXd out(1);
    out[0] = std::pow(std::abs(x[1]) + x[0] * x[0], -0.75);
    return out;
}

Eigen::MatrixXd counterexample_jacobian(CounterexampleVariant v, const Eigen::Vector2d& x) {
    if (v == CounterexampleVariant::RNotC) {
        const double r2 = x.squaredNorm(), r4 = r2 * r2;
        Eigen::Matrix2d J;
        J << (x[1] * x[1] - x[0] * x[0]) / r4, -2.0 * x[0] * x[1] / r4, 2.0 * x[0] * x[1] / r4,
            (x[1] * x[1] - x[0] * x[0]) / r4;
        return J;
    }
    const double s = std::abs(x[1]) + x[0] * x[0];
    const double sign = x[1] > 0.0 ? 1.0 : (x[1] < 0.0 ? -1.0 : 0.0);
    Eigen::MatrixXd J(1, 2);
    J(0, 0) = -0.75 * std::pow(s, -1.75) * 2.0 * x[0];
    J(0, 1) = -0.75 * std::pow(s, -1.75) * sign;
    return J;
}

CounterexampleTable no_trace_counterexample(CounterexampleVariant v, const std::vector<double>& eps, int grid_cells,
                                            double away_radius) {
    if (eps.empty()) throw DomainError("empty epsilon list");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0 && eps[i] < 1.0)) throw DomainError("epsilon values must lie in (0, 1)");
        if (i > 0 && !(eps[i] < eps[i - 1])) throw DomainError("epsilon list must be decreasing");
    }
    if (grid_cells < 8) throw DomainError("grid too coarse");
    if (!(away_radius > 0.0 && away_radius < 1.0)) throw DomainError("away radius must lie in (0, 1)");

    CounterexampleTable t;
    t.variant = v;
    t.grid_cells = grid_cells;
    t.away_radius = away_radius;
    t.op = v == CounterexampleVariant::RNotC ? builtin("devsymgrad", 2) : builtin("d1only", 2);
    t.hyperplane_normal = v == CounterexampleVariant::RNotC ? Eigen::Vector2d(1.0, 0.0) : Eigen::Vector2d(0.0, 1.0);
    const Eigen::Vector2d line_dir(-t.hyperplane_normal[1], t.hyperplane_normal[0]);

    const GaussRule rule = gauss_legendre(kPanelPoints);
    // Angular panels graded towards the hyperplane directions, where the not-R profile is steep.
    std::vector<std::pair<double, double>> angular;
    const double theta0 = std::atan2(line_dir[1], line_dir[0]) - std::numbers::pi / 2.0;
    for (int q = 0; q < 4; ++q) {
        const double a = theta0 + q * std::numbers::pi / 2.0, b = a + std::numbers::pi / 2.0;
        const bool towards_a = q % 2 == 0;
        for (auto [lo, hi] : graded(0.0, 1.0, 40)) {
            if (towards_a)
                angular.emplace_back(a + lo * (b - a), a + hi * (b - a));
            else
                angular.emplace_back(b - hi * (b - a), b - lo * (b - a));
        }
    }

    const Operator& op = t.op;
    for (double e : eps) {
        CounterexampleRow row;
        row.eps = e;
        const auto radial = radial_panels(e);
        row.interior_l1 = integrate(radial, rule, [&](double r) {
            return r * integrate(angular, rule, [&](double th) {
                       return counterexample_field(v, Eigen::Vector2d(r * std::cos(th), r * std::sin(th))).norm();
                   });
        });
        row.interior_A_l1 = integrate(radial, rule, [&](double r) {
            return r * integrate(angular, rule, [&](double th) {
                       const Eigen::Vector2d x(r * std::cos(th), r * std::sin(th));
                       const Eigen::MatrixXd J = counterexample_jacobian(v, x);
                       Eigen::VectorXd Au = op.coeff(0) * J.col(0) + op.coeff(1) * J.col(1);
                       return Au.norm();
                   });
        });
        row.line_l1 = 2.0 * integrate(radial, rule, [&](double s) {
            return 0.5 * (counterexample_field(v, s * line_dir).norm() + counterexample_field(v, -s * line_dir).norm());
        });
        row.line_oracle = v == CounterexampleVariant::RNotC ? 2.0 * std::log(1.0 / e) : 4.0 * (std::pow(e, -0.5) - 1.0);
        t.rows.push_back(row);
    }

    // Grid on [-1, 1]^2.
    const Grid g = Grid::cube(2, -1.0, 1.0, grid_cells);
    const int N = op.N(), K = op.K();
    const DiscreteField u = DiscreteField::sample(g, N, [&](const Point& x, std::span<double> out) {
        const Eigen::VectorXd val = counterexample_field(v, Eigen::Vector2d(x[0], x[1]));
        for (int j = 0; j < N; ++j) out[j] = val[j];
    });
    const MeasureField fwd = apply_discrete(op, u);
    const double h = g.spacing();
    Eigen::VectorXd dens(K), d(N);
    for (std::size_t c = 0; c < g.size(); ++c) {
        const Point x = g.center(c);
        const double r = x.norm();
        if (!(r < 1.0 && r > away_radius)) continue;
        bool interior = true;
        for (int a = 0; a < 2; ++a) interior = interior && g.coord(c, a) > 0 && g.coord(c, a) < g.cells(a) - 1;
        if (!interior) continue;
        dens.setZero();
        for (int a = 0; a < 2; ++a) {
            const std::size_t s = g.stride(a);
            for (int j = 0; j < N; ++j) d[j] = (u.at(c + s)[j] - u.at(c - s)[j]) / (2.0 * h);
            dens += op.coeff(a) * d;
        }
        t.discrete_A_l1_centered += dens.norm() * g.cell_volume();
        t.discrete_A_l1_forward += Eigen::Map<const Eigen::VectorXd>(fwd.at(c).data(), K).norm() * g.cell_volume();
    }
    return t;
}

}  // namespace bva
