#include "bva/quadrature.hpp"

#include "bva/error.hpp"

#include <cmath>
#include <numbers>

namespace bva {

GaussRule gauss_legendre(int points) {
    if (points < 1) throw DimensionError("Gauss rule needs at least one point");
    GaussRule r;
    r.nodes.resize(points);
    r.weights.resize(points);
    for (int i = 0; i < points; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= points; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = points * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= points; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = points * (x * p1 - p0) / (x * x - 1.0);
        r.nodes[i] = x;
        r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

BallQuadrature::BallQuadrature(int n, int cells_per_radius, int refine)
    : n_(n), cells_per_radius_(cells_per_radius) {
    if (n < 1 || n > 3) throw DimensionError("ball quadrature supports n = 1..3");
    if (cells_per_radius < 1 || refine < 1) throw DimensionError("ball quadrature resolution must be positive");
    const int m = cells_per_radius;
    const double h = 1.0 / m;
    const double sub_h = h / refine;
    std::vector<double> pts;
    std::vector<double> wts;
    const int cells_axis = 2 * m;
    int total = 1;
    for (int a = 0; a < n; ++a) total *= cells_axis;
    const double full_w = std::pow(h, n);
    const double sub_w = std::pow(sub_h, n);
    int sub_total = 1;
    for (int a = 0; a < n; ++a) sub_total *= refine;
    double c[3], lo[3];
    for (int idx = 0; idx < total; ++idx) {
        int rem = idx;
        double near2 = 0.0, far2 = 0.0;
        for (int a = 0; a < n; ++a) {
            const int i = rem % cells_axis;
            rem /= cells_axis;
            lo[a] = -1.0 + i * h;
            c[a] = lo[a] + 0.5 * h;
            const double hi = lo[a] + h;
            const double nearest = (lo[a] > 0.0) ? lo[a] : (hi < 0.0 ? hi : 0.0);
            const double farthest = std::max(std::abs(lo[a]), std::abs(hi));
            near2 += nearest * nearest;
            far2 += farthest * farthest;
        }
        if (near2 >= 1.0) continue;
        if (far2 <= 1.0) {
            pts.insert(pts.end(), c, c + n);
            wts.push_back(full_w);
            continue;
        }
        for (int s = 0; s < sub_total; ++s) {
            int r2 = s;
            double p[3];
            double norm2 = 0.0;
            for (int a = 0; a < n; ++a) {
                const int k = r2 % refine;
                r2 /= refine;
                p[a] = lo[a] + (k + 0.5) * sub_h;
                norm2 += p[a] * p[a];
            }
            if (norm2 < 1.0) {
                pts.insert(pts.end(), p, p + n);
                wts.push_back(sub_w);
            }
        }
    }
    points_ = Eigen::Map<Eigen::MatrixXd>(pts.data(), n, static_cast<Eigen::Index>(wts.size()));
    weights_ = Eigen::Map<Eigen::VectorXd>(wts.data(), static_cast<Eigen::Index>(wts.size()));
}

}  // namespace bva
