#pragma once

#include "bva/discrete.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace bva {

enum class IntegrandKind { TV, Area, Table, TruncatedConcave };

struct GrowthConstants {
    double c1 = 0.0;  ///< c1 |z| <= f(z)
    double c2 = 0.0;  ///< f(z) <= c2 |z| + c3
    double c3 = 0.0;
};

struct RecessionValue {
    double value = 0.0;
    std::vector<double> quotients;  ///< f(x, tA) / t for t = 2^0 .. 2^12
    std::vector<double> witness;    ///< (f(x, tA) - f(x, 0)) / t, nondecreasing for convex f
    bool monotone = true;
};

/// Radial integrand f(x, z) = a(x) g(|z|) on K-vectors z.
///   tv    : g(t) = t
///   area  : g(t) = sqrt(1 + t^2)
///   table : piecewise linear through (t_i, g_i), linear extrapolation past the last node
///   truncated concave : g(t) = -min(t^2, cap), a non-convex control
class Integrand {
public:
    static Integrand tv();
    static Integrand area();
    /// Nodes must start at t = 0 and increase strictly.
    static Integrand table(std::vector<double> t, std::vector<double> g);
    static Integrand truncated_concave(double cap = 1.0);

    /// Same profile with continuous positive weight a(x).
    Integrand weighted(std::function<double(const Point&)> a) const;

    IntegrandKind kind() const noexcept { return kind_; }
    std::string name() const;
    bool has_weight() const noexcept { return static_cast<bool>(weight_); }
    double weight(const Point& x) const { return weight_ ? weight_(x) : 1.0; }

    double profile(double t) const;
    /// Right derivative of the profile.
    double profile_slope(double t) const;
    double value(const Point& x, const Eigen::Ref<const Eigen::VectorXd>& z) const;
    double value(const Point& x, std::span<const double> z) const;

    /// f_infinity(x, A): analytic for tv and area, t = 2^12 quotient for tables.
    /// Throws DegenerateInputError when the difference-quotient witness decreases.
    RecessionValue recession(const Point& x, const Eigen::Ref<const Eigen::VectorXd>& A) const;
    double recession_value(const Point& x, const Eigen::Ref<const Eigen::VectorXd>& A) const;

    /// Sampled on a geometric t-grid.
    GrowthConstants growth() const;
    /// Radial convexity: g convex and nondecreasing on sampled segments.
    bool is_convex() const;

    /// argmin_r lambda g(r) + (r - y)^2 / 2 over r >= 0, for y >= 0.
    double radial_prox(double y, double lambda) const;
    /// prox of sigma f*(x, .) at q (in place): q - sigma prox_{f/sigma}(q / sigma).
    void dual_prox(const Point& x, double sigma, std::span<double> q) const;

private:
    IntegrandKind kind_ = IntegrandKind::TV;
    std::vector<double> t_, g_;
    double cap_ = 1.0;
    std::function<double(const Point&)> weight_;
};

/// Two columns "t g" per line; '#' comments.
Integrand parse_integrand_table(std::istream& in);
Integrand load_integrand(const std::string& source);

}  // namespace bva
