#include "bva/discrete.hpp"

#include "bva/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace bva {

Grid::Grid(std::vector<int> cells, Point origin, double spacing)
    : cells_(std::move(cells)), origin_(std::move(origin)), spacing_(spacing) {
    if (cells_.empty() || cells_.size() > 3) throw DimensionError("grids support 1 to 3 dimensions");
    if (origin_.size() != static_cast<Eigen::Index>(cells_.size()))
        throw DimensionError("grid origin dimension does not match cell counts");
    if (!(spacing_ > 0.0)) throw DimensionError("grid spacing must be positive");
    strides_.assign(cells_.size(), 1);
    size_ = 1;
    for (int a = dim() - 1; a >= 0; --a) {
        if (cells_[a] < 1) throw DimensionError("grid needs at least one cell per axis");
        strides_[a] = size_;
        size_ *= static_cast<std::size_t>(cells_[a]);
    }
    cell_volume_ = std::pow(spacing_, dim());
}

Grid Grid::cube(int dim, double lo, double hi, int cells_per_axis) {
    if (cells_per_axis < 1 || !(hi > lo)) throw DimensionError("invalid cube grid");
    Point o = Point::Constant(dim, lo);
    return Grid(std::vector<int>(dim, cells_per_axis), o, (hi - lo) / cells_per_axis);
}

Point Grid::center(std::size_t idx) const {
    Point x(dim());
    for (int a = 0; a < dim(); ++a) x[a] = origin_[a] + (coord(idx, a) + 0.5) * spacing_;
    return x;
}

Point Grid::upper() const {
    Point x(dim());
    for (int a = 0; a < dim(); ++a) x[a] = origin_[a] + cells_[a] * spacing_;
    return x;
}

DiscreteField::DiscreteField(Grid grid, int components)
    : grid_(std::move(grid)), components_(components), values_(grid_.size() * components, 0.0) {
    if (components < 1) throw DimensionError("field needs at least one component");
}

DiscreteField::DiscreteField(Grid grid, int components, std::vector<double> values)
    : grid_(std::move(grid)), components_(components), values_(std::move(values)) {
    if (components < 1) throw DimensionError("field needs at least one component");
    if (values_.size() != grid_.size() * components)
        throw DimensionError("field value count does not match grid size times components");
}

DiscreteField DiscreteField::sample(const Grid& grid, int components, const FieldFn& f) {
    DiscreteField u(grid, components);
    for (std::size_t c = 0; c < grid.size(); ++c) f(grid.center(c), u.at(c));
    return u;
}

void DiscreteField::interpolate(const Point& x, std::span<double> out) const {
    const int d = grid_.dim();
    int base[3] = {0, 0, 0};
    double frac[3] = {0, 0, 0};
    for (int a = 0; a < d; ++a) {
        const int m = grid_.cells(a);
        double t = (x[a] - grid_.origin()[a]) / grid_.spacing() - 0.5;
        if (m == 1) {
            base[a] = 0;
            frac[a] = 0.0;
            continue;
        }
        t = std::clamp(t, 0.0, double(m - 1));
        int i = std::min(static_cast<int>(std::floor(t)), m - 2);
        base[a] = i;
        frac[a] = t - i;
    }
    std::fill(out.begin(), out.end(), 0.0);
    const int corners = 1 << d;
    for (int k = 0; k < corners; ++k) {
        double w = 1.0;
        std::size_t idx = 0;
        for (int a = 0; a < d; ++a) {
            const int bit = (k >> a) & 1;
            if (grid_.cells(a) == 1 && bit) {
                w = 0.0;
                break;
            }
            w *= bit ? frac[a] : 1.0 - frac[a];
            idx += static_cast<std::size_t>(base[a] + bit) * grid_.stride(a);
        }
        if (w == 0.0) continue;
        const double* v = values_.data() + idx * components_;
        for (int j = 0; j < components_; ++j) out[j] += w * v[j];
    }
}

FieldFn DiscreteField::as_function() const {
    return [this](const Point& x, std::span<double> out) { interpolate(x, out); };
}

double DiscreteField::max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double DiscreteField::l1_norm(std::span<const char> mask) const {
    double s = 0.0;
    for (std::size_t c = 0; c < grid_.size(); ++c) {
        if (!mask.empty() && !mask[c]) continue;
        double q = 0.0;
        for (double v : at(c)) q += v * v;
        s += std::sqrt(q);
    }
    return s * grid_.cell_volume();
}

DiscreteField& DiscreteField::operator+=(const DiscreteField& o) {
    if (!(grid_ == o.grid_) || components_ != o.components_) throw DimensionError("field shape mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

DiscreteField& DiscreteField::operator-=(const DiscreteField& o) {
    if (!(grid_ == o.grid_) || components_ != o.components_) throw DimensionError("field shape mismatch");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

DiscreteField& DiscreteField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

DiscreteField operator-(DiscreteField a, const DiscreteField& b) { return a -= b; }
DiscreteField operator+(DiscreteField a, const DiscreteField& b) { return a += b; }

double MeasureField::total_variation(std::span<const char> mask) const {
    double s = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        if (!mask.empty() && !mask[c]) continue;
        double q = 0.0;
        for (double v : at(c)) q += v * v;
        s += std::sqrt(q);
    }
    return s * grid.cell_volume() + singular_total();
}

double MeasureField::singular_total() const {
    double s = 0.0;
    for (const auto& a : singular) s += a.mass.norm();
    return s;
}

double MeasureField::pair(const FieldFn& phi, std::span<const char> mask) const {
    std::vector<double> buf(components);
    double bulk = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        if (!mask.empty() && !mask[c]) continue;
        phi(grid.center(c), buf);
        const auto d = at(c);
        for (int k = 0; k < components; ++k) bulk += d[k] * buf[k];
    }
    double sing = 0.0;
    for (const auto& a : singular) {
        phi(a.x, buf);
        for (int k = 0; k < components; ++k) sing += a.mass[k] * buf[k];
    }
    return bulk * grid.cell_volume() + sing;
}

MeasureField apply_discrete(const Operator& op, const DiscreteField& u) {
    const Grid& g = u.grid();
    if (g.dim() != op.n()) throw DimensionError("grid dimension " + std::to_string(g.dim()) + " != n=" +
                                                std::to_string(op.n()));
    if (u.components() != op.N()) throw DimensionError("field has " + std::to_string(u.components()) +
                                                       " components, operator expects N=" + std::to_string(op.N()));
    for (int a = 0; a < g.dim(); ++a)
        if (g.cells(a) < 2) throw DimensionError("grid too small: axis " + std::to_string(a) + " has < 2 cells");

    const int N = op.N(), K = op.K();
    const double inv_h = 1.0 / g.spacing();
    MeasureField out{g, K, std::vector<double>(g.size() * K, 0.0), {}};
    std::vector<double> diff(N);
    const auto& vals = u.values();
    for (std::size_t c = 0; c < g.size(); ++c) {
        double* dens = out.density.data() + c * K;
        for (int a = 0; a < g.dim(); ++a) {
            const std::size_t s = g.stride(a);
            const bool last = g.coord(c, a) == g.cells(a) - 1;
            const std::size_t hi = last ? c : c + s;
            const std::size_t lo = last ? c - s : c;
            for (int j = 0; j < N; ++j) diff[j] = (vals[hi * N + j] - vals[lo * N + j]) * inv_h;
            const Eigen::MatrixXd& A = op.coeff(a);
            for (int j = 0; j < N; ++j) {
                if (diff[j] == 0.0) continue;
                for (int k = 0; k < K; ++k) dens[k] += A(k, j) * diff[j];
            }
        }
    }
    return out;
}

DiscreteField apply_transpose(const Operator& op, const Grid& g, std::span<const double> p) {
    const int N = op.N(), K = op.K();
    if (g.dim() != op.n()) throw DimensionError("grid dimension does not match operator");
    if (p.size() != g.size() * K) throw DimensionError("dual field size does not match grid");
    DiscreteField out(g, N);
    auto& vals = out.values();
    const double inv_h = 1.0 / g.spacing();
    std::vector<double> t(N);
    for (std::size_t c = 0; c < g.size(); ++c) {
        const double* pc = p.data() + c * K;
        for (int a = 0; a < g.dim(); ++a) {
            const std::size_t s = g.stride(a);
            const bool last = g.coord(c, a) == g.cells(a) - 1;
            const std::size_t hi = last ? c : c + s;
            const std::size_t lo = last ? c - s : c;
            // Row c of D_a has +1/h at `hi`, -1/h at `lo`; scatter A_a^T p_c.
            const Eigen::MatrixXd& A = op.coeff(a);
            for (int j = 0; j < N; ++j) {
                double acc = 0.0;
                for (int k = 0; k < K; ++k) acc += A(k, j) * pc[k];
                t[j] = acc * inv_h;
            }
            for (int j = 0; j < N; ++j) {
                vals[hi * N + j] += t[j];
                vals[lo * N + j] -= t[j];
            }
        }
    }
    return out;
}

double total_variation_dual(const Operator& op, const DiscreteField& u, int test_budget, std::uint64_t seed) {
    const Grid& g = u.grid();
    const int K = op.K();
    const MeasureField du = apply_discrete(op, u);

    std::vector<char> interior(g.size(), 1);
    for (std::size_t c = 0; c < g.size(); ++c)
        for (int a = 0; a < g.dim(); ++a) {
            const int i = g.coord(c, a);
            if (i == 0 || i == g.cells(a) - 1) interior[c] = 0;
        }

    auto dual_value = [&](const std::vector<double>& phi) {
        const DiscreteField adj = apply_transpose(op, g, phi);
        double s = 0.0;
        for (std::size_t i = 0; i < adj.values().size(); ++i) s += u.values()[i] * adj.values()[i];
        return std::abs(s) * g.cell_volume();
    };

    double best = 0.0;
    std::vector<double> phi(g.size() * K, 0.0);

    // Sign pattern of the discrete density.
    for (std::size_t c = 0; c < g.size(); ++c) {
        const auto d = du.at(c);
        double norm = 0.0;
        for (double v : d) norm += v * v;
        norm = std::sqrt(norm);
        for (int k = 0; k < K; ++k) phi[c * K + k] = (interior[c] && norm > 0.0) ? d[k] / norm : 0.0;
    }
    best = std::max(best, dual_value(phi));

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss;
    const Point lo = g.lower(), hi = g.upper();
    const double extent = (hi - lo).maxCoeff();
    for (int t = 1; t < test_budget; ++t) {
        std::fill(phi.begin(), phi.end(), 0.0);
        const int bumps = 1 + static_cast<int>(unif(rng) * 6);
        for (int b = 0; b < bumps; ++b) {
            Point center(g.dim());
            for (int a = 0; a < g.dim(); ++a) center[a] = lo[a] + unif(rng) * (hi[a] - lo[a]);
            const double radius = extent * (0.05 + 0.45 * unif(rng));
            Eigen::VectorXd amp(K);
            for (int k = 0; k < K; ++k) amp[k] = gauss(rng);
            for (std::size_t c = 0; c < g.size(); ++c) {
                if (!interior[c]) continue;
                const double r2 = (g.center(c) - center).squaredNorm() / (radius * radius);
                if (r2 >= 1.0) continue;
                const double w = std::pow(1.0 - r2, 3);
                for (int k = 0; k < K; ++k) phi[c * K + k] += w * amp[k];
            }
        }
        double mx = 0.0;
        for (std::size_t c = 0; c < g.size(); ++c) {
            double q = 0.0;
            for (int k = 0; k < K; ++k) q += phi[c * K + k] * phi[c * K + k];
            mx = std::max(mx, std::sqrt(q));
        }
        if (mx == 0.0) continue;
        for (double& v : phi) v /= mx;
        best = std::max(best, dual_value(phi));
    }
    return best;
}

}  // namespace bva
