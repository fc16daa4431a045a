#include "bva/solver.hpp"

#include "bva/error.hpp"
#include "bva/quadrature.hpp"
#include "bva/trace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace bva {

namespace {

struct CellSets {
    std::vector<char> inside, free, active;
    std::vector<std::size_t> free_list, active_list;
    std::vector<Point> active_points;
    double fixed_inside_energy = 0.0;  // h^n sum f(A_h u0) over inside cells outside the stencils of free cells
};

template <class Visit>
void visit_stencil(const Grid& g, std::size_t c, Visit&& visit) {
    for (int a = 0; a < g.dim(); ++a) {
        const std::size_t s = g.stride(a);
        const bool last = g.coord(c, a) == g.cells(a) - 1;
        visit(a, last ? c - s : c, last ? c : c + s);
    }
}

void check_problem(const DirichletProblem& dp) {
    if (dp.grid.dim() != dp.op.n() || dp.domain.dim() != dp.op.n())
        throw DimensionError("grid, domain and operator dimensions differ");
    if (!dp.u0) throw DomainError("missing boundary datum u0");
    if (dp.options.ring < 2) throw DomainError("ring must be at least 2 cells");
}

CellSets classify_cells(const DirichletProblem& dp, bool hard) {
    const Grid& g = dp.grid;
    CellSets s;
    s.inside = dp.domain.cell_mask(g);
    s.free = s.inside;
    if (hard) {
        for (std::size_t c = 0; c < g.size(); ++c) {
            if (!s.inside[c]) continue;
            for (int a = 0; a < g.dim(); ++a) {
                const int k = g.coord(c, a);
                const std::size_t st = g.stride(a);
                const bool lo_in = k > 0 && s.inside[c - st];
                const bool hi_in = k + 1 < g.cells(a) && s.inside[c + st];
                if (!lo_in || !hi_in) s.free[c] = 0;
            }
        }
    }
    s.active.assign(g.size(), 0);
    for (std::size_t c = 0; c < g.size(); ++c) {
        if (s.free[c]) s.free_list.push_back(c);
        bool act = false;
        visit_stencil(g, c, [&](int, std::size_t lo, std::size_t hi) { act = act || s.free[lo] || s.free[hi]; });
        s.active[c] = act;
        if (act) {
            s.active_list.push_back(c);
            s.active_points.push_back(g.center(c));
        }
    }
    if (s.free_list.empty()) throw DomainError("no free cells: grid too coarse for the domain");
    return s;
}

double norm_of(const double* v, int K) {
    double s = 0.0;
    for (int k = 0; k < K; ++k) s += v[k] * v[k];
    return std::sqrt(s);
}

DiscreteField with_exterior_datum(const DirichletProblem& dp, const DiscreteField& u, const DiscreteField& U0,
                                  const std::vector<char>& inside) {
    if (!(u.grid() == dp.grid) || u.components() != dp.op.N())
        throw DimensionError("field does not live on the problem grid");
    DiscreteField w = u;
    const int N = dp.op.N();
    for (std::size_t c = 0; c < dp.grid.size(); ++c)
        if (!inside[c])
            for (int j = 0; j < N; ++j) w.at(c)[j] = U0.at(c)[j];
    return w;
}

double objective(const DirichletProblem& dp, const MeasureField& Au, const MeasureField& Au0,
                 const std::vector<char>& inside) {
    const Grid& g = dp.grid;
    const int K = dp.op.K();
    double s = 0.0;
    for (std::size_t c = 0; c < g.size(); ++c) {
        const Point x = g.center(c);
        if (inside[c]) {
            s += dp.integrand.value(x, Au.at(c));
        } else {
            bool same = true;
            for (int k = 0; k < K && same; ++k) same = Au.at(c)[k] == Au0.at(c)[k];
            if (!same) s += dp.integrand.value(x, Au.at(c)) - dp.integrand.value(x, Au0.at(c));
        }
    }
    return s * g.cell_volume();
}

// Fills exterior cells layer by layer with the mean of already filled axis neighbours.
void extend_outward(DiscreteField& d, const std::vector<char>& inside, int layers) {
    const Grid& g = d.grid();
    const int N = d.components();
    std::vector<char> filled = inside;
    std::vector<double> acc(N);
    for (int layer = 0; layer < layers; ++layer) {
        std::vector<char> next = filled;
        for (std::size_t c = 0; c < g.size(); ++c) {
            if (filled[c]) continue;
            std::fill(acc.begin(), acc.end(), 0.0);
            int count = 0;
            for (int a = 0; a < g.dim(); ++a) {
                const int k = g.coord(c, a);
                const std::size_t st = g.stride(a);
                for (const std::size_t nb : {k > 0 ? c - st : c, k + 1 < g.cells(a) ? c + st : c}) {
                    if (nb == c || !filled[nb]) continue;
                    for (int j = 0; j < N; ++j) acc[j] += d.at(nb)[j];
                    ++count;
                }
            }
            if (count == 0) continue;
            for (int j = 0; j < N; ++j) d.at(c)[j] = acc[j] / count;
            next[c] = 1;
        }
        filled.swap(next);
    }
}

}  // namespace

Grid solver_grid(const Domain& domain, int cells, int ring) {
    if (cells < 2) throw DomainError("grid needs at least 2 cells across the domain");
    if (ring < 2) throw DomainError("ring must be at least 2 cells");
    const auto [lo, hi] = domain.bounding_box();
    const Point ext = hi - lo;
    const double h = ext.maxCoeff() / cells;
    std::vector<int> counts(static_cast<std::size_t>(domain.dim()));
    Point origin(domain.dim());
    for (int a = 0; a < domain.dim(); ++a) {
        const int inner = static_cast<int>(std::ceil(ext[a] / h - 1e-9));
        counts[a] = inner + 2 * ring;
        origin[a] = 0.5 * (lo[a] + hi[a]) - 0.5 * inner * h - ring * h;
    }
    return Grid(std::move(counts), std::move(origin), h);
}

double discrete_energy(const DirichletProblem& dp, const DiscreteField& u) {
    check_problem(dp);
    const DiscreteField U0 = DiscreteField::sample(dp.grid, dp.op.N(), dp.u0);
    const auto inside = dp.domain.cell_mask(dp.grid);
    const DiscreteField w = with_exterior_datum(dp, u, U0, inside);
    return objective(dp, apply_discrete(dp.op, w), apply_discrete(dp.op, U0), inside);
}

Energy energy(const DirichletProblem& dp, const DiscreteField& u, BoundaryMode mode) {
    check_problem(dp);
    const Grid& g = dp.grid;
    const int N = dp.op.N(), K = dp.op.K();
    const DiscreteField U0 = DiscreteField::sample(g, N, dp.u0);
    const auto inside = dp.domain.cell_mask(g);
    const DiscreteField w = with_exterior_datum(dp, u, U0, inside);

    Energy e;
    e.discrete = objective(dp, apply_discrete(dp.op, w), apply_discrete(dp.op, U0), inside);

    // Bulk: differences taken inside the domain only.
    const double inv_h = 1.0 / g.spacing();
    const auto& vals = w.values();
    std::vector<double> dens(K), diff(N);
    for (std::size_t c = 0; c < g.size(); ++c) {
        if (!inside[c]) continue;
        std::fill(dens.begin(), dens.end(), 0.0);
        for (int a = 0; a < g.dim(); ++a) {
            const int k = g.coord(c, a);
            const std::size_t st = g.stride(a);
            std::size_t lo = c, hi = c;
            if (k + 1 < g.cells(a) && inside[c + st])
                hi = c + st;
            else if (k > 0 && inside[c - st])
                lo = c - st;
            else
                continue;
            for (int j = 0; j < N; ++j) diff[j] = (vals[hi * N + j] - vals[lo * N + j]) * inv_h;
            const Eigen::MatrixXd& A = dp.op.coeff(a);
            for (int j = 0; j < N; ++j)
                for (int r = 0; r < K; ++r) dens[r] += A(r, j) * diff[j];
        }
        e.bulk += dp.integrand.value(g.center(c), std::span<const double>(dens)) * g.cell_volume();
    }
    e.boundary_ring = e.discrete - e.bulk;

    if (mode == BoundaryMode::Trace) {
        DiscreteField d = w - U0;
        extend_outward(d, inside, dp.options.ring);
        TraceOptions opts;
        const int j_fine = finest_level(g);
        const int j0 = dp.domain.coarsest_level();
        if (j_fine < j0)
            throw DimensionError("grid too coarse for the trace boundary term (needs 2^-" + std::to_string(j0) +
                                 " >= h); use the ring boundary mode");
        opts.j_min = j0;
        opts.j_max = j_fine;
        const TraceResult tr = compute_trace(dp.op, dp.domain, d, opts);
        Eigen::VectorXd v(N), nu(dp.op.n());
        for (std::size_t m = 0; m < tr.mesh.size(); ++m) {
            const auto mi = static_cast<Eigen::Index>(m);
            v = tr.boundary_values.col(mi);
            nu = tr.mesh.normals.col(mi);
            const Point x = tr.mesh.points.col(mi);
            e.boundary_trace += tr.mesh.weights[mi] * dp.integrand.recession_value(x, dp.op.pairing(v, nu));
        }
        e.trace_levels = tr.levels;
        if (!tr.per_level_l1_diffs.empty()) {
            const double last = tr.per_level_l1_diffs.back();
            const double floor_ = 1e-8 * (1.0 + d.max_abs()) * dp.domain.boundary_measure();
            e.trace_relative_diff = last / std::max(tr.trace_l1, 1e-300);
            e.trace_converged = last <= 5e-2 * tr.trace_l1 || last <= floor_;
            if (!e.trace_converged) {
                std::ostringstream msg;
                msg << "trace of u - u0 did not converge: last level difference " << last << ", trace norm "
                    << tr.trace_l1;
                throw InconsistencyError(msg.str());
            }
        }
        e.total = e.bulk + e.boundary_trace;
    } else {
        e.total = e.discrete;
    }
    return e;
}

MinimizeResult minimize(const DirichletProblem& dp) {
    check_problem(dp);
    if (!dp.integrand.is_convex()) throw DomainError("integrand '" + dp.integrand.name() + "' is not convex");
    const Grid& g = dp.grid;
    const int N = dp.op.N(), K = dp.op.K();
    const SolverOptions& opt = dp.options;
    const double vol = g.cell_volume();

    CellSets cells = classify_cells(dp, opt.hard_boundary);
    const DiscreteField U0 = DiscreteField::sample(g, N, dp.u0);
    const MeasureField Au0 = apply_discrete(dp.op, U0);

    // Exterior active cells contribute f(A_h u) - f(A_h u0); fixed inside cells a constant.
    double ext_offset = 0.0;
    for (std::size_t i = 0; i < cells.active_list.size(); ++i) {
        const std::size_t c = cells.active_list[i];
        if (!cells.inside[c]) ext_offset += dp.integrand.value(cells.active_points[i], Au0.at(c));
    }
    for (std::size_t c = 0; c < g.size(); ++c)
        if (cells.inside[c] && !cells.active[c]) cells.fixed_inside_energy += dp.integrand.value(g.center(c), Au0.at(c));

    auto eval = [&](const std::vector<double>& Ku, double* tv) {
        double s = 0.0, t = 0.0;
        for (std::size_t i = 0; i < cells.active_list.size(); ++i) {
            const std::size_t c = cells.active_list[i];
            const std::span<const double> z(Ku.data() + c * K, static_cast<std::size_t>(K));
            s += dp.integrand.value(cells.active_points[i], z);
            t += norm_of(z.data(), K);
        }
        if (tv) *tv = t * vol;
        return (s - ext_offset + cells.fixed_inside_energy) * vol;
    };

    // Operator norm of u_free -> A_h u by power iteration.
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    DiscreteField v(g, N);
    for (std::size_t c : cells.free_list)
        for (int j = 0; j < N; ++j) v.at(c)[j] = normal(rng);
    double lambda = 0.0;
    for (int it = 0; it < opt.power_iterations; ++it) {
        double vn = 0.0;
        for (double x : v.values()) vn += x * x;
        vn = std::sqrt(vn);
        if (!(vn > 0.0) || !std::isfinite(vn)) throw Error("step-size estimate failed: degenerate power iterate");
        v *= 1.0 / vn;
        const MeasureField y = apply_discrete(dp.op, v);
        DiscreteField z = apply_transpose(dp.op, g, y.density);
        DiscreteField next(g, N);
        double rq = 0.0;
        for (std::size_t c : cells.free_list)
            for (int j = 0; j < N; ++j) {
                next.at(c)[j] = z.at(c)[j];
                rq += z.at(c)[j] * v.at(c)[j];
            }
        lambda = rq;
        v = std::move(next);
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error("step-size estimate failed: operator norm not positive");

    MinimizeResult res;
    res.operator_norm = std::sqrt(lambda) * 1.02;
    res.tau = res.sigma = 1.0 / res.operator_norm;

    DiscreteField u = U0;
    if (!opt.start_from_datum)
        for (std::size_t c : cells.free_list)
            for (int j = 0; j < N; ++j) u.at(c)[j] = 0.0;

    std::vector<double> p(g.size() * K, 0.0);
    std::vector<double> Ku = apply_discrete(dp.op, u).density;
    std::vector<double> Ku_old = Ku;
    std::vector<double> q(K);
    const std::vector<char> no_mask;

    res.datum_energy = eval(Au0.density, nullptr);
    double tv0 = 0.0;
    const double e0 = eval(Ku, &tv0);
    res.raw_energy.push_back(e0);
    res.energy_trace.push_back(e0);
    double best = e0;
    DiscreteField best_u = u;
    auto coercivity = [&](double tv) {
        double l1 = 0.0;
        for (std::size_t c : cells.free_list) l1 += norm_of(u.at(c).data(), N);
        for (std::size_t c = 0; c < g.size(); ++c)
            if (cells.inside[c] && !cells.free[c]) l1 += norm_of(u.at(c).data(), N);
        return (l1 * vol + tv) / (1.0 + std::abs(e0));
    };
    res.coercivity_constant = coercivity(tv0);

    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        for (std::size_t i = 0; i < cells.active_list.size(); ++i) {
            const std::size_t c = cells.active_list[i];
            double* pc = p.data() + c * K;
            for (int k = 0; k < K; ++k) q[k] = pc[k] + res.sigma * (2.0 * Ku[c * K + k] - Ku_old[c * K + k]);
            dp.integrand.dual_prox(cells.active_points[i], res.sigma, q);
            std::copy(q.begin(), q.end(), pc);
        }
        const DiscreteField gp = apply_transpose(dp.op, g, p);
        for (std::size_t c : cells.free_list)
            for (int j = 0; j < N; ++j) u.at(c)[j] -= res.tau * gp.at(c)[j];
        Ku_old.swap(Ku);
        Ku = apply_discrete(dp.op, u).density;

        double tv = 0.0;
        const double e = eval(Ku, &tv);
        if (!std::isfinite(e)) throw InconsistencyError("solver diverged: non-finite energy");
        res.raw_energy.push_back(e);
        if (e < best) {
            best = e;
            best_u = u;
        }
        res.energy_trace.push_back(best);
        res.coercivity_constant = std::max(res.coercivity_constant, coercivity(tv));

        const std::size_t k = res.raw_energy.size() - 1;
        if (k >= static_cast<std::size_t>(opt.window)) {
            const double scale = std::max(std::abs(e), 1e-300);
            const double raw_change = std::abs(e - res.raw_energy[k - opt.window]) / scale;
            const double best_change = std::abs(best - res.energy_trace[k - opt.window]) / scale;
            if (raw_change < opt.tolerance && best_change < opt.tolerance) {
                res.converged = true;
                ++it;
                break;
            }
        }
    }
    res.iterations = it;
    res.u = std::move(best_u);
    res.energy = best;
    return res;
}

ConsistencyGap consistency_gap(const DirichletProblem& dp) {
    ConsistencyGap out;
    DirichletProblem relaxed = dp;
    relaxed.options.hard_boundary = false;
    DirichletProblem hard = dp;
    hard.options.hard_boundary = true;
    out.relaxed = minimize(relaxed);
    out.constrained = minimize(hard);
    out.min_relaxed = out.relaxed.energy;
    out.inf_constrained = out.constrained.energy;
    out.gap = (out.inf_constrained - out.min_relaxed) / std::max(std::abs(out.inf_constrained), 1e-300);
    return out;
}

QuasiconvexityProbe quasiconvexity_probe(const Operator& op, const Integrand& gfun, const Eigen::VectorXd& A,
                                         int trials, std::uint64_t seed, int quadrature_points) {
    const int n = op.n(), N = op.N(), K = op.K();
    if (A.size() != K) throw DimensionError("A must have K components");
    if (trials < 1) throw DomainError("trials must be positive");
    if (n > 3) throw DimensionError("quasiconvexity probe supports n <= 3");

    const GaussRule rule = gauss_legendre(quadrature_points);
    // Map the rule to (0, 1).
    std::vector<double> nodes, weights;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        nodes.push_back(0.5 * (rule.nodes[i] + 1.0));
        weights.push_back(0.5 * rule.weights[i]);
    }
    const int q = quadrature_points;
    int total = 1;
    for (int a = 0; a < n; ++a) total *= q;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> freq(1, 3), nterms(1, 4), comp(0, N - 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> amp(0.05, 2.0);

    const Point zero_x = Point::Zero(n);
    const double lhs = gfun.value(zero_x, A);
    QuasiconvexityProbe out;
    out.worst_margin = std::numeric_limits<double>::infinity();
    const double tol = 1e-10 * (1.0 + std::abs(lhs));

    Eigen::VectorXd z(K), dphi(N);
    for (int t = 0; t < trials; ++t) {
        const int terms = nterms(rng);
        const double scale = amp(rng);
        std::vector<std::vector<int>> modes;
        std::vector<double> coeffs;
        for (int m = 0; m < terms; ++m) {
            std::vector<int> mode{comp(rng)};
            for (int a = 0; a < n; ++a) mode.push_back(freq(rng));
            modes.push_back(std::move(mode));
            coeffs.push_back(scale * normal(rng));
        }
        double rhs = 0.0;
        std::array<int, 3> idx{0, 0, 0};
        for (int flat = 0; flat < total; ++flat) {
            int r = flat;
            double w = 1.0;
            for (int a = n - 1; a >= 0; --a) {
                idx[a] = r % q;
                r /= q;
                w *= weights[idx[a]];
            }
            z = A;
            for (int alpha = 0; alpha < n; ++alpha) {
                dphi.setZero();
                for (std::size_t m = 0; m < modes.size(); ++m) {
                    double val = coeffs[m];
                    for (int a = 0; a < n; ++a) {
                        const double k = std::numbers::pi * modes[m][a + 1];
                        const double x = nodes[idx[a]];
                        val *= a == alpha ? k * std::cos(k * x) : std::sin(k * x);
                    }
                    dphi[modes[m][0]] += val;
                }
                z += op.coeff(alpha) * dphi;
            }
            rhs += w * gfun.value(zero_x, z);
        }
        ++out.trials;
        const double margin = rhs - lhs;
        out.worst_margin = std::min(out.worst_margin, margin);
        if (margin < -tol) {
            out.passed = false;
            out.witness = QuasiconvexityWitness{t, std::move(modes), std::move(coeffs), lhs, rhs};
            break;
        }
    }
    return out;
}

}  // namespace bva
