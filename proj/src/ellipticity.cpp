#include "bva/ellipticity.hpp"

#include "bva/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <limits>
#include <sstream>
#include <tuple>

namespace bva {

namespace {

constexpr int kKeep = 8;
constexpr int kRefineSteps = 400;

// Midpoint grid in hyperspherical angles on S^(m-1): m-2 polar angles in (0, pi),
// one azimuth in [0, 2 pi).
template <class Visit>
void sphere_grid(int m, int density, Visit&& visit) {
    Eigen::VectorXd x(m);
    if (m == 1) {
        x[0] = 1.0;
        visit(x);
        return;
    }
    const int angles = m - 1;
    std::vector<int> idx(angles, 0);
    while (true) {
        double s = 1.0;
        for (int k = 0; k < angles; ++k) {
            const double phi = (k + 1 < angles) ? std::numbers::pi * (idx[k] + 0.5) / density
                                                : 2.0 * std::numbers::pi * idx[k] / density;
            x[k] = s * std::cos(phi);
            s *= std::sin(phi);
        }
        x[m - 1] = s;
        visit(x);
        int k = 0;
        while (k < angles && ++idx[k] == density) idx[k++] = 0;
        if (k == angles) break;
    }
}

template <class Matrix>
using ColumnOf = Eigen::Matrix<typename Matrix::Scalar, Eigen::Dynamic, 1>;

template <class Matrix>
Matrix symbol_columns(const Operator& op, const ColumnOf<Matrix>& eta) {
    Matrix B(op.K(), op.n());
    for (int a = 0; a < op.n(); ++a) B.col(a) = op.coeff(a).template cast<typename Matrix::Scalar>() * eta;
    return B;
}

// Smallest (or largest) singular pair of the Gram matrix of m.
template <class Matrix>
std::pair<double, ColumnOf<Matrix>> extreme_right_vector(const Matrix& m, bool largest) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.adjoint() * m);
    const Eigen::Index k = largest ? m.cols() - 1 : 0;
    return {std::sqrt(std::max(es.eigenvalues()[k], 0.0)), ColumnOf<Matrix>(es.eigenvectors().col(k))};
}

template <class Matrix, class Vec>
std::pair<Vec, Vec> alternate(const Operator& op, Vec xi, bool largest, double& value) {
    auto [v0, eta] = extreme_right_vector(Matrix(op.symbol(xi)), largest);
    value = v0;
    for (int it = 0; it < kRefineSteps; ++it) {
        xi = extreme_right_vector(symbol_columns<Matrix>(op, eta), largest).second;
        const double prev = value;
        std::tie(value, eta) = extreme_right_vector(Matrix(op.symbol(xi)), largest);
        if (std::abs(prev - value) <= 1e-15 * std::max(1.0, std::abs(prev))) break;
    }
    return {xi, eta};
}

struct Candidate {
    double value;
    Eigen::VectorXd point;
};

void keep_best(std::vector<Candidate>& best, double value, const Eigen::VectorXd& p, bool largest) {
    auto worse = [largest](double a, double b) { return largest ? a < b : a > b; };
    if (static_cast<int>(best.size()) < kKeep) {
        best.push_back({value, p});
    } else {
        auto it = std::max_element(best.begin(), best.end(),
                                   [&](const Candidate& a, const Candidate& b) { return worse(b.value, a.value); });
        if (!worse(value, it->value)) *it = {value, p};
    }
}

Eigen::VectorXcd to_complex(const Eigen::VectorXd& x, int n) {
    Eigen::VectorXcd z(n);
    for (int a = 0; a < n; ++a) z[a] = Complex(x[a], x[n + a]);
    return z;
}

}  // namespace

RealEllipticity check_r_elliptic(const Operator& op, int grid_density) {
    if (grid_density < 8) throw DimensionError("grid density must be at least 8");
    const int n = op.n();
    std::vector<Candidate> lows, highs;
    sphere_grid(n, grid_density, [&](const Eigen::VectorXd& xi) {
        const Eigen::MatrixXd S = op.symbol(xi);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S.transpose() * S, Eigen::EigenvaluesOnly);
        keep_best(lows, std::sqrt(std::max(es.eigenvalues()[0], 0.0)), xi, false);
        keep_best(highs, std::sqrt(std::max(es.eigenvalues()[op.N() - 1], 0.0)), xi, true);
    });

    RealEllipticity r;
    r.kappa1 = std::numeric_limits<double>::infinity();
    for (const auto& c : lows) {
        double v = 0.0;
        auto [xi, eta] = alternate<Eigen::MatrixXd, Eigen::VectorXd>(op, c.point, false, v);
        if (v < r.kappa1) {
            r.kappa1 = v;
            r.minimizer = {xi, eta, (op.symbol(xi) * eta).norm()};
        }
    }
    for (const auto& c : highs) {
        double v = 0.0;
        alternate<Eigen::MatrixXd, Eigen::VectorXd>(op, c.point, true, v);
        r.kappa2 = std::max(r.kappa2, v);
    }
    r.kappa1 = r.minimizer.value;
    r.tolerance = kEllipticityTolerance * r.kappa2;
    r.elliptic = r.kappa1 > r.tolerance;
    if (!r.elliptic) r.witness = r.minimizer;
    return r;
}

ComplexEllipticity check_c_elliptic(const Operator& op, int grid_density) {
    if (grid_density < 8) throw DimensionError("grid density must be at least 8");
    const int n = op.n();
    std::vector<Candidate> lows;
    double kappa2 = 0.0;
    sphere_grid(2 * n, grid_density, [&](const Eigen::VectorXd& x) {
        const Eigen::MatrixXcd S = op.symbol(to_complex(x, n));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S.adjoint() * S, Eigen::EigenvaluesOnly);
        keep_best(lows, std::sqrt(std::max(es.eigenvalues()[0], 0.0)), x, false);
        kappa2 = std::max(kappa2, std::sqrt(std::max(es.eigenvalues()[op.N() - 1], 0.0)));
    });
    // Largest singular value over the complex sphere equals the real one up to sampling; use both.
    kappa2 = std::max(kappa2, check_r_elliptic(op, grid_density).kappa2);

    ComplexEllipticity c;
    c.minimum = std::numeric_limits<double>::infinity();
    ComplexWitness best;
    for (const auto& cand : lows) {
        double v = 0.0;
        auto [xi, eta] = alternate<Eigen::MatrixXcd, Eigen::VectorXcd>(op, to_complex(cand.point, n), false, v);
        const double value = (op.symbol(xi) * eta).norm();
        if (value < c.minimum) {
            c.minimum = value;
            best = {xi, eta, value};
        }
    }
    c.tolerance = kEllipticityTolerance * kappa2;
    c.elliptic = c.minimum > c.tolerance;
    if (!c.elliptic) c.witness = best;

    c.probe = fdn_probe(op, default_cutoff(op));
    if (c.probe.stabilized != c.elliptic) {
        std::ostringstream msg;
        msg << "complex-sphere minimum " << c.minimum << " (tolerance " << c.tolerance << ") says "
            << (c.elliptic ? "C-elliptic" : "not C-elliptic") << " but kernel growth up to degree "
            << default_cutoff(op) << " (total dimension " << c.probe.dimension << ") says "
            << (c.probe.stabilized ? "finite" : "not stabilized");
        throw InconsistencyError(msg.str());
    }
    return c;
}

Cancelling check_cancelling(const Operator& op, int samples, std::uint64_t seed) {
    const int n = op.n();
    if (samples < n + 1) throw DimensionError("cancelling check needs at least n+1 samples");
    Cancelling out;
    if (!check_r_elliptic(op, 8).elliptic)
        out.warning = "operator is not R-elliptic; symbol ranges may vary in dimension";

    std::vector<Eigen::VectorXd> freqs;
    for (int a = 0; a < n; ++a) freqs.push_back(Eigen::VectorXd::Unit(n, a));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd xi(n);
        for (int a = 0; a < n; ++a) xi[a] = gauss(rng);
        freqs.push_back(xi.normalized());
    }

    Eigen::MatrixXd Q = orthonormal_span(op.symbol(freqs[0]));
    out.frequencies = 1;
    for (std::size_t f = 1; f < freqs.size() && Q.cols() > 0; ++f) {
        const Eigen::MatrixXd R = orthonormal_span(op.symbol(freqs[f]));
        ++out.frequencies;
        if (R.cols() == 0) {
            Q.resize(op.K(), 0);
            break;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Q.transpose() * R, Eigen::ComputeThinU);
        Eigen::Index keep = 0;
        while (keep < svd.singularValues().size() && svd.singularValues()[keep] > 1.0 - 1e-8) ++keep;
        Q = orthonormal_span(Q * svd.matrixU().leftCols(keep));
    }
    out.intersection_basis = Q;
    out.cancelling = Q.cols() == 0;
    return out;
}

EllipticityReport classify(const Operator& op, int grid_density, std::uint64_t seed, int cancelling_samples) {
    EllipticityReport rep;
    const auto r = check_r_elliptic(op, grid_density);
    rep.r_elliptic = r.elliptic;
    rep.kappa1 = r.kappa1;
    rep.kappa2 = r.kappa2;
    rep.witness_real = r.witness;
    rep.tolerance = r.tolerance;

    const auto c = check_c_elliptic(op, grid_density);
    rep.c_elliptic = c.elliptic;
    rep.witness_complex = c.witness;
    rep.complex_minimum = c.minimum;
    rep.probe = c.probe;
    if (rep.c_elliptic && !rep.r_elliptic)
        throw InconsistencyError("C-elliptic verdict without R-ellipticity");

    const auto k = check_cancelling(op, std::max(cancelling_samples, op.n() + 1), seed);
    rep.cancelling = k.cancelling;
    rep.cancelling_dimension = static_cast<int>(k.intersection_basis.cols());
    rep.cancelling_warning = k.warning;
    return rep;
}

}  // namespace bva
