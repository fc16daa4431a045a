#include "bva/trace.hpp"

#include "bva/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bva {

namespace {

constexpr double kReflectedDepth = 2.25;  // centre depth in reflected radii
constexpr int kLatticeBits = 21;

long long lattice_key(const std::array<int, 3>& i) {
    const long long off = 1LL << (kLatticeBits - 1);
    return ((i[0] + off) << (2 * kLatticeBits)) | ((i[1] + off) << kLatticeBits) | (i[2] + off);
}

double bump(double t2) {
    const double b = 1.0 - t2;
    return b > 0.0 ? b * b * b : 0.0;
}

}  // namespace

WhitneyCover::WhitneyCover(const Domain& domain, int level)
    : domain_(domain), level_(level), spacing_(std::ldexp(1.0, -level) / 8.0) {
    if (domain.dim() > 3) throw DimensionError("cover supports n <= 3");
    const int j0 = domain.coarsest_level();
    if (level < j0)
        throw DomainError("level " + std::to_string(level) + " is below the coarsest level j0 = " +
                          std::to_string(j0) + " that resolves the geometry");
    const int n = domain.dim();
    const double r = radius();
    const double rs = reflected_radius();
    const double width = strip_width();
    auto [lo, hi] = domain.bounding_box();
    const double pad = width + 2.0 * r;
    std::array<int, 3> first{0, 0, 0}, last{0, 0, 0};
    for (int a = 0; a < n; ++a) {
        first[a] = static_cast<int>(std::floor((lo[a] - pad) / spacing_));
        last[a] = static_cast<int>(std::ceil((hi[a] + pad) / spacing_));
    }
    std::array<int, 3> idx = first;
    Point c(n);
    while (true) {
        for (int a = 0; a < n; ++a) c[a] = idx[a] * spacing_;
        const double sd = domain.signed_distance(c);
        if (sd > -width - r && sd <= r) {
            CoverBall b;
            b.lattice = idx;
            b.center = c;
            const Point p = domain.nearest_point(c);
            const Point nu = domain.outer_normal(c);
            Point rc = p - kReflectedDepth * rs * nu;
            for (int it = 0; it < 64 && domain.signed_distance(rc) > -2.0 * rs; ++it)
                rc -= (domain.signed_distance(rc) + kReflectedDepth * rs) * domain.distance_gradient(rc);
            if (domain.signed_distance(rc) > -2.0 * rs) {
                std::ostringstream msg;
                msg << "cannot place reflected ball for level-" << level << " ball at lattice (";
                for (int a = 0; a < n; ++a) msg << (a ? "," : "") << idx[a];
                msg << "), centre " << c.transpose() << ", in " << domain.describe();
                throw DomainError(msg.str());
            }
            b.reflected_center = rc;
            index_.emplace(lattice_key(idx), balls_.size());
            balls_.push_back(std::move(b));
        }
        int a = 0;
        while (a < n && ++idx[a] > last[a]) idx[a] = first[a], ++a;
        if (a == n) break;
    }
}

template <class Visit>
void WhitneyCover::visit_lattice(const Point& x, Visit&& visit) const {
    const int n = domain_.dim();
    const double r = radius();
    std::array<int, 3> first{0, 0, 0}, last{0, 0, 0};
    for (int a = 0; a < n; ++a) {
        first[a] = static_cast<int>(std::floor((x[a] - r) / spacing_));
        last[a] = static_cast<int>(std::ceil((x[a] + r) / spacing_));
    }
    std::array<int, 3> idx = first;
    Point c(n);
    while (true) {
        for (int a = 0; a < n; ++a) c[a] = idx[a] * spacing_;
        const double t2 = (x - c).squaredNorm() / (r * r);
        if (t2 < 1.0) visit(idx, t2);
        int a = 0;
        while (a < n && ++idx[a] > last[a]) idx[a] = first[a], ++a;
        if (a == n) break;
    }
}

double WhitneyCover::cutoff(const Point& x) const {
    const double depth = -domain_.signed_distance(x);
    const double inner = 0.5 * strip_width();
    if (depth <= inner) return 1.0;
    if (depth >= strip_width()) return 0.0;
    const double t = (depth - inner) / (strip_width() - inner);
    return 1.0 - t * t * (3.0 - 2.0 * t);
}

void WhitneyCover::partition(const Point& x, std::vector<std::pair<std::size_t, double>>& out) const {
    out.clear();
    double total = 0.0;
    visit_lattice(x, [&](const std::array<int, 3>& idx, double t2) {
        const double w = bump(t2);
        total += w;
        if (auto it = index_.find(lattice_key(idx)); it != index_.end()) out.emplace_back(it->second, w);
    });
    if (total > 0.0)
        for (auto& [k, w] : out) w /= total;
}

int WhitneyCover::multiplicity(const Point& x) const {
    int count = 0;
    visit_lattice(x, [&](const std::array<int, 3>&, double) { ++count; });
    return count;
}

double WhitneyCover::min_clearance_ratio() const {
    double worst = std::numeric_limits<double>::infinity();
    const double rs = reflected_radius();
    for (const auto& b : balls_) worst = std::min(worst, (-domain_.signed_distance(b.reflected_center) - rs) / rs);
    return worst;
}

KernelBasis trace_kernel(const Operator& op, const TraceOptions& opts) {
    const int cutoff = opts.kernel_cutoff.value_or(default_cutoff(op));
    KernelBasis kb = kernel_basis(op, cutoff);
    if (!kb.minimal_l && !opts.allow_truncated_kernel)
        throw Error("operator '" + op.name() + "' has no finite polynomial kernel up to degree " +
                    std::to_string(cutoff) + "; request a truncated kernel explicitly");
    return kb;
}

TjEvaluator::TjEvaluator(const WhitneyCover& cover, const KernelProjector& unit_projector, const DiscreteField& u)
    : cover_(cover), proj_(unit_projector), u_(u) {
    if (u.components() != unit_projector.components())
        throw DimensionError("field components do not match the kernel basis");
    if (u.grid().dim() != cover.domain().dim()) throw DimensionError("field grid does not match domain dimension");
}

const PolynomialVectorField& TjEvaluator::projection(std::size_t ball) const {
    auto it = cache_.find(ball);
    if (it != cache_.end()) return it->second;
    const auto& b = cover_.balls()[ball];
    const KernelProjector p = proj_.moved(Eigen::VectorXd(b.reflected_center), cover_.reflected_radius());
    return cache_.emplace(ball, p.project(u_)).first->second;
}

void TjEvaluator::smoothed(const Point& x, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    cover_.partition(x, scratch_);
    const auto& weights = scratch_;
    std::vector<double> buf(out.size());
    for (const auto& [k, w] : weights) {
        projection(k).evaluate(x, buf);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += w * buf[j];
    }
}

void TjEvaluator::evaluate(const Point& x, std::span<double> out) const {
    const double rho = cover_.cutoff(x);
    if (rho == 0.0) {
        u_.interpolate(x, out);
        return;
    }
    smoothed(x, out);
    if (rho == 1.0) return;
    std::vector<double> ux(out.size());
    u_.interpolate(x, ux);
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = (1.0 - rho) * ux[j] + rho * out[j];
}

DiscreteField apply_Tj(const Operator& op, const WhitneyCover& cover, const DiscreteField& u,
                       const KernelBasis& basis, int cells_per_radius) {
    if (basis.fields.empty()) throw Error("missing kernel basis for T_j");
    if (basis.fields.front().components() != op.N()) throw DimensionError("kernel basis does not match operator");
    const KernelProjector unit(basis, Eigen::VectorXd::Zero(op.n()), 1.0, cells_per_radius);
    TjEvaluator T(cover, unit, u);
    DiscreteField out = u;
    const Grid& g = u.grid();
    for (std::size_t c = 0; c < g.size(); ++c) {
        const Point x = g.center(c);
        if (!cover.domain().contains(x) || cover.cutoff(x) == 0.0) continue;
        T.evaluate(x, out.at(c));
    }
    return out;
}

int finest_level(const Grid& grid) {
    return static_cast<int>(std::floor(-std::log2(grid.spacing()) + 1e-9));
}

TraceResult compute_trace(const Operator& op, const Domain& domain, const DiscreteField& u, const TraceOptions& opts) {
    return compute_trace(trace_kernel(op, opts), op, domain, u, opts);
}

TraceResult compute_trace(const KernelBasis& basis, const Operator& op, const Domain& domain, const DiscreteField& u,
                          const TraceOptions& opts) {
    if (basis.fields.empty()) throw Error("missing kernel basis for the trace");
    if (u.components() != op.N()) throw DimensionError("field components do not match operator N");
    const Grid& g = u.grid();
    const int j_min = opts.j_min.value_or(domain.coarsest_level());
    const int j_max = opts.j_max.value_or(finest_level(g));
    if (std::ldexp(1.0, -j_max) < g.spacing() * (1.0 - 1e-9))
        throw DimensionError("j_max = " + std::to_string(j_max) + " is too fine for grid spacing " +
                             std::to_string(g.spacing()));
    if (j_max < j_min)
        throw DimensionError("level range is empty: j_min = " + std::to_string(j_min) +
                             ", j_max = " + std::to_string(j_max));

    TraceResult res;
    res.tolerance = opts.tolerance;
    const double finest_radius = std::ldexp(1.0, -j_max) / 8.0;
    res.mesh = domain.boundary_mesh(2.0 * finest_radius / std::max(1, opts.mesh_points_per_ball));
    const Eigen::Index M = static_cast<Eigen::Index>(res.mesh.size());
    const int N = op.N();
    const KernelProjector unit(basis, Eigen::VectorXd::Zero(op.n()), 1.0, opts.cells_per_radius);

    for (int j = j_min; j <= j_max; ++j) {
        const WhitneyCover cover(domain, j);
        const TjEvaluator T(cover, unit, u);
        Eigen::MatrixXd vals(N, M);
        Point x(domain.dim());
        for (Eigen::Index m = 0; m < M; ++m) {
            x = res.mesh.points.col(m);
            T.smoothed(x, std::span<double>(vals.col(m).data(), N));
        }
        res.levels.push_back(j);
        res.level_values.push_back(std::move(vals));
    }
    auto l1 = [&](const Eigen::MatrixXd& v) {
        double s = 0.0;
        for (Eigen::Index m = 0; m < M; ++m) s += res.mesh.weights[m] * v.col(m).norm();
        return s;
    };
    const MeasureField Au = apply_discrete(op, u);
    for (std::size_t i = 0; i + 1 < res.level_values.size(); ++i) {
        res.per_level_l1_diffs.push_back(l1(res.level_values[i + 1] - res.level_values[i]));
        const int j = res.levels[i];
        const double near = std::ldexp(1.0, -(j + 2)), far = std::ldexp(1.0, -(j - 2));
        std::vector<char> mask(g.size(), 0);
        for (std::size_t c = 0; c < g.size(); ++c) {
            const double depth = -domain.signed_distance(g.center(c));
            mask[c] = depth >= near && depth < far;
        }
        res.strip_variation.push_back(Au.total_variation(mask));
    }
    res.boundary_values = res.level_values.back();
    res.trace_l1 = l1(res.boundary_values);
    res.converged = !res.per_level_l1_diffs.empty() &&
                    res.per_level_l1_diffs.back() <= opts.tolerance * std::max(res.trace_l1, 1e-300);
    return res;
}

void apply_adjoint(const Operator& op, const FieldFn& phi, const Point& x, std::span<double> out, double step) {
    const int n = op.n(), K = op.K();
    Eigen::VectorXd plus(K), minus(K);
    Eigen::Map<Eigen::VectorXd> o(out.data(), static_cast<Eigen::Index>(out.size()));
    o.setZero();
    Point y = x;
    for (int a = 0; a < n; ++a) {
        y[a] = x[a] + step;
        phi(y, std::span<double>(plus.data(), K));
        y[a] = x[a] - step;
        phi(y, std::span<double>(minus.data(), K));
        y[a] = x[a];
        o += op.coeff(a).transpose() * ((plus - minus) / (2.0 * step));
    }
}

GaussGreen gauss_green_residual(const Operator& op, const Domain& domain, const DiscreteField& u, const FieldFn& phi,
                                const TraceOptions& opts, double trace_tolerance) {
    const Grid& g = u.grid();
    const int N = op.N(), K = op.K();
    GaussGreen gg;
    gg.trace = compute_trace(op, domain, u, opts);
    const auto& diffs = gg.trace.per_level_l1_diffs;
    if (diffs.empty() || diffs.back() > trace_tolerance * std::max(gg.trace.trace_l1, 1e-300)) {
        std::ostringstream msg;
        msg << "trace not converged: last level difference "
            << (diffs.empty() ? std::numeric_limits<double>::quiet_NaN() : diffs.back()) << " against trace norm "
            << gg.trace.trace_l1 << " (relative tolerance " << trace_tolerance << ')';
        throw InconsistencyError(msg.str());
    }
    const auto frac = domain.volume_fractions(g);
    Eigen::VectorXd ph(K), adj(N), Au(K), d(N);
    for (std::size_t c = 0; c < g.size(); ++c) {
        if (frac[c] == 0.0) continue;
        const Point x = g.center(c);
        phi(x, std::span<double>(ph.data(), K));
        apply_adjoint(op, phi, x, std::span<double>(adj.data(), N));
        const double w = frac[c] * g.cell_volume();
        // Centred differences at the cell centre, one-sided on the outer layer.
        Au.setZero();
        for (int a = 0; a < g.dim(); ++a) {
            const std::size_t s = g.stride(a);
            const int k = g.coord(c, a);
            const std::size_t lo = k > 0 ? c - s : c, hi = k + 1 < g.cells(a) ? c + s : c;
            const double span = static_cast<double>((hi - lo) / s) * g.spacing();
            for (int j = 0; j < N; ++j) d[j] = (u.at(hi)[j] - u.at(lo)[j]) / span;
            Au += op.coeff(a) * d;
        }
        const auto uc = u.at(c);
        gg.bulk_derivative += w * Au.dot(ph);
        gg.bulk_adjoint += w * Eigen::Map<const Eigen::VectorXd>(uc.data(), N).dot(adj);
    }
    const auto& mesh = gg.trace.mesh;
    Point x(domain.dim());
    for (Eigen::Index m = 0; m < static_cast<Eigen::Index>(mesh.size()); ++m) {
        x = mesh.points.col(m);
        phi(x, std::span<double>(ph.data(), K));
        const Eigen::VectorXd nu = mesh.normals.col(m);
        gg.boundary += mesh.weights[m] * op.pairing(gg.trace.boundary_values.col(m), nu).dot(ph);
    }
    gg.residual = std::abs(gg.bulk_derivative + gg.bulk_adjoint - gg.boundary);
    return gg;
}

GluingResult gluing_jump(const Operator& op, const Domain& inner, const Domain& outer, const DiscreteField& u,
                         const DiscreteField& v, const TraceOptions& opts) {
    if (!(u.grid() == v.grid())) throw DimensionError("inner and outer fields must share a grid");
    if (inner.exterior() || outer.exterior()) throw DomainError("gluing needs bounded inner and outer domains");
    const Grid& g = u.grid();
    const KernelBasis basis = trace_kernel(op, opts);
    GluingResult res;
    res.inner_trace = compute_trace(basis, op, inner, u, opts);
    res.mesh = res.inner_trace.mesh;
    const double margin = 4.0 * std::ldexp(1.0, -res.inner_trace.levels.front()) / 8.0;
    Point x(inner.dim());
    for (Eigen::Index m = 0; m < static_cast<Eigen::Index>(res.mesh.size()); ++m) {
        x = res.mesh.points.col(m);
        if (outer.signed_distance(x) > -margin)
            throw DomainError("inner domain is not compactly contained in the outer domain");
    }
    res.outer_trace = compute_trace(basis, op, inner.complement(), v, opts);

    const int N = op.N(), K = op.K();
    const Eigen::Index M = static_cast<Eigen::Index>(res.mesh.size());
    res.jump.resize(K, M);
    for (Eigen::Index m = 0; m < M; ++m) {
        const Eigen::VectorXd nu = res.mesh.normals.col(m);
        const Eigen::VectorXd d = res.outer_trace.boundary_values.col(m) - res.inner_trace.boundary_values.col(m);
        res.jump.col(m) = op.pairing(d, nu);
        res.jump_mass += res.mesh.weights[m] * res.jump.col(m).norm();
    }

    res.inner_fraction = inner.volume_fractions(g);
    res.outer_fraction = outer.volume_fractions(g);
    for (std::size_t c = 0; c < g.size(); ++c)
        res.outer_fraction[c] = std::max(0.0, res.outer_fraction[c] - res.inner_fraction[c]);
    const MeasureField Au = apply_discrete(op, u);
    const MeasureField Av = apply_discrete(op, v);
    res.measure.grid = g;
    res.measure.components = K;
    res.measure.density.assign(g.size() * K, 0.0);
    for (std::size_t c = 0; c < g.size(); ++c) {
        auto out = res.measure.at(c);
        const auto a = Au.at(c), b = Av.at(c);
        for (int k = 0; k < K; ++k) out[k] = res.inner_fraction[c] * a[k] + res.outer_fraction[c] * b[k];
    }
    for (Eigen::Index m = 0; m < M; ++m) {
        SingularAtom atom;
        atom.x = res.mesh.points.col(m);
        atom.weight = res.mesh.weights[m];
        atom.mass = res.jump.col(m) * res.mesh.weights[m];
        res.measure.singular.push_back(std::move(atom));
    }
    (void)N;
    return res;
}

double gluing_pairing_defect(const Operator& op, const GluingResult& gl, const DiscreteField& u,
                             const DiscreteField& v, const FieldFn& phi) {
    const Grid& g = u.grid();
    const int N = op.N(), K = op.K();
    const double lhs = gl.measure.pair(phi);
    double rhs = 0.0;
    Eigen::VectorXd adj(N);
    for (std::size_t c = 0; c < g.size(); ++c) {
        const double fi = gl.inner_fraction[c], fo = gl.outer_fraction[c];
        if (fi == 0.0 && fo == 0.0) continue;
        apply_adjoint(op, phi, g.center(c), std::span<double>(adj.data(), N));
        const auto uc = u.at(c), vc = v.at(c);
        for (int j = 0; j < N; ++j) rhs += g.cell_volume() * (fi * uc[j] + fo * vc[j]) * adj[j];
    }
    (void)K;
    return std::abs(lhs + rhs);
}

ZeroTrace zero_trace_check(const Operator& op, const Domain& domain, const DiscreteField& u, double tolerance,
                           const TraceOptions& opts) {
    const Grid& g = u.grid();
    const Point lo = g.lower(), hi = g.upper();
    const double pad = 2.0 * g.spacing();
    const Domain outer = Domain::box(Eigen::VectorXd(lo.array() + pad), Eigen::VectorXd(hi.array() - pad));
    const DiscreteField zero(g, u.components());
    const GluingResult gl = gluing_jump(op, domain, outer, u, zero, opts);

    ZeroTrace z;
    z.trace_l1 = gl.inner_trace.trace_l1;
    z.jump_mass = gl.jump_mass;
    z.threshold = tolerance * std::max(1.0, u.max_abs()) * domain.boundary_measure();
    double symbol_norm = 0.0;
    for (Eigen::Index m = 0; m < static_cast<Eigen::Index>(gl.mesh.size()); ++m) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(op.symbol(Eigen::VectorXd(gl.mesh.normals.col(m))));
        symbol_norm = std::max(symbol_norm, svd.singularValues()[0]);
    }
    const bool by_trace = z.trace_l1 < z.threshold;
    const bool by_jump = z.jump_mass < z.threshold * std::max(symbol_norm, 1e-300);
    if (by_trace != by_jump) {
        std::ostringstream msg;
        msg << "zero-trace verdicts disagree: trace L1 " << z.trace_l1 << " vs jump mass " << z.jump_mass
            << " (threshold " << z.threshold << ", symbol norm " << symbol_norm << ')';
        throw InconsistencyError(msg.str());
    }
    z.zero = by_trace;
    return z;
}

}  // namespace bva
