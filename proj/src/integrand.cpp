#include "bva/integrand.hpp"

#include "bva/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace bva {

namespace {

constexpr double kRecessionScale = 4096.0;  // 2^12

}  // namespace

Integrand Integrand::tv() { return Integrand(); }

Integrand Integrand::area() {
    Integrand f;
    f.kind_ = IntegrandKind::Area;
    return f;
}

Integrand Integrand::table(std::vector<double> t, std::vector<double> g) {
    if (t.size() != g.size() || t.size() < 2) throw DimensionError("table needs at least two (t, g) nodes");
    if (t.front() != 0.0) throw DomainError("table must start at t = 0");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1])) throw DomainError("table nodes must increase strictly");
    Integrand f;
    f.kind_ = IntegrandKind::Table;
    f.t_ = std::move(t);
    f.g_ = std::move(g);
    return f;
}

Integrand Integrand::truncated_concave(double cap) {
    if (!(cap > 0.0)) throw DomainError("cap must be positive");
    Integrand f;
    f.kind_ = IntegrandKind::TruncatedConcave;
    f.cap_ = cap;
    return f;
}

Integrand Integrand::weighted(std::function<double(const Point&)> a) const {
    Integrand f = *this;
    f.weight_ = std::move(a);
    return f;
}

std::string Integrand::name() const {
    switch (kind_) {
        case IntegrandKind::TV:
            return "tv";
        case IntegrandKind::Area:
            return "area";
        case IntegrandKind::Table:
            return "table";
        case IntegrandKind::TruncatedConcave:
            return "truncated-concave";
    }
    return "?";
}

double Integrand::profile(double t) const {
    switch (kind_) {
        case IntegrandKind::TV:
            return t;
        case IntegrandKind::Area:
            return std::hypot(1.0, t);
        case IntegrandKind::TruncatedConcave:
            return -std::min(t * t, cap_);
        case IntegrandKind::Table: {
            const std::size_t m = t_.size();
            if (t >= t_[m - 1]) return g_[m - 1] + (t - t_[m - 1]) * (g_[m - 1] - g_[m - 2]) / (t_[m - 1] - t_[m - 2]);
            const auto it = std::upper_bound(t_.begin(), t_.end(), t);
            const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
            return g_[i] + (t - t_[i]) * (g_[i + 1] - g_[i]) / (t_[i + 1] - t_[i]);
        }
    }
    return 0.0;
}

double Integrand::profile_slope(double t) const {
    switch (kind_) {
        case IntegrandKind::TV:
            return 1.0;
        case IntegrandKind::Area:
            return t / std::hypot(1.0, t);
        case IntegrandKind::TruncatedConcave:
            return t * t < cap_ ? -2.0 * t : 0.0;
        case IntegrandKind::Table: {
            const std::size_t m = t_.size();
            if (t >= t_[m - 2]) return (g_[m - 1] - g_[m - 2]) / (t_[m - 1] - t_[m - 2]);
            const auto it = std::upper_bound(t_.begin(), t_.end(), t);
            const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
            return (g_[i + 1] - g_[i]) / (t_[i + 1] - t_[i]);
        }
    }
    return 0.0;
}

double Integrand::value(const Point& x, const Eigen::Ref<const Eigen::VectorXd>& z) const {
    return weight(x) * profile(z.norm());
}

double Integrand::value(const Point& x, std::span<const double> z) const {
    double s = 0.0;
    for (double v : z) s += v * v;
    return weight(x) * profile(std::sqrt(s));
}

RecessionValue Integrand::recession(const Point& x, const Eigen::Ref<const Eigen::VectorXd>& A) const {
    RecessionValue r;
    const double a = A.norm();
    const double f0 = profile(0.0);
    const double w = weight(x);
    for (int k = 0; k <= 12; ++k) {
        const double t = std::ldexp(1.0, k);
        r.quotients.push_back(w * profile(t * a) / t);
        r.witness.push_back(w * (profile(t * a) - f0) / t);
    }
    for (std::size_t k = 1; k < r.witness.size(); ++k)
        if (r.witness[k] < r.witness[k - 1] - 1e-12 * std::max(1.0, std::abs(r.witness[k - 1]))) r.monotone = false;
    switch (kind_) {
        case IntegrandKind::TV:
        case IntegrandKind::Area:
            r.value = w * a;
            break;
        case IntegrandKind::Table:
        case IntegrandKind::TruncatedConcave:
            r.value = w * profile(kRecessionScale * a) / kRecessionScale;
            break;
    }
    if (!r.monotone && kind_ == IntegrandKind::Table)
        throw DegenerateInputError("recession quotient ladder is not monotone: tabulated profile is not convex");
    return r;
}

double Integrand::recession_value(const Point& x, const Eigen::Ref<const Eigen::VectorXd>& A) const {
    switch (kind_) {
        case IntegrandKind::TV:
        case IntegrandKind::Area:
            return weight(x) * A.norm();
        default:
            return recession(x, A).value;
    }
}

GrowthConstants Integrand::growth() const {
    GrowthConstants g;
    g.c1 = std::numeric_limits<double>::infinity();
    const double f0 = profile(0.0);
    std::vector<double> ts;
    for (int k = -20; k <= 40; ++k) ts.push_back(std::ldexp(1.0, k));
    for (double t : ts) {
        g.c1 = std::min(g.c1, profile(t) / t);
        g.c2 = std::max(g.c2, (profile(t) - f0) / t);
    }
    g.c3 = f0;
    for (double t : ts) g.c3 = std::max(g.c3, profile(t) - g.c2 * t);
    return g;
}

bool Integrand::is_convex() const {
    std::vector<double> ts{0.0};
    for (int k = -12; k <= 24; ++k) ts.push_back(std::ldexp(1.0, k));
    if (kind_ == IntegrandKind::Table) ts.insert(ts.end(), t_.begin(), t_.end());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const double a = ts[i], b = ts[i + 1];
        if (profile(b) < profile(a) - 1e-12) return false;
        const double mid = 0.5 * (a + b);
        if (profile(mid) > 0.5 * (profile(a) + profile(b)) + 1e-12 * std::max(1.0, std::abs(profile(b)))) return false;
    }
    for (std::size_t i = 0; i + 2 < ts.size(); ++i) {
        const double s1 = (profile(ts[i + 1]) - profile(ts[i])) / (ts[i + 1] - ts[i]);
        const double s2 = (profile(ts[i + 2]) - profile(ts[i + 1])) / (ts[i + 2] - ts[i + 1]);
        if (s2 < s1 - 1e-9 * std::max(1.0, std::abs(s1))) return false;
    }
    return true;
}

double Integrand::radial_prox(double y, double lambda) const {
    if (y <= 0.0) return 0.0;
    switch (kind_) {
        case IntegrandKind::TV:
            return std::max(0.0, y - lambda);
        case IntegrandKind::Area: {
            // r + lambda r / sqrt(1 + r^2) = y, Newton from r = y.
            double r = std::max(0.0, y - lambda);
            for (int it = 0; it < 50; ++it) {
                const double s = std::hypot(1.0, r);
                const double F = r + lambda * r / s - y;
                const double dF = 1.0 + lambda / (s * s * s);
                const double step = F / dF;
                r = std::max(0.0, r - step);
                if (std::abs(step) <= 1e-15 * std::max(1.0, y)) break;
            }
            return r;
        }
        default: {
            double lo = 0.0, hi = y;
            for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, y); ++it) {
                const double mid = 0.5 * (lo + hi);
                if (lambda * profile_slope(mid) + mid - y > 0.0)
                    hi = mid;
                else
                    lo = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
}

void Integrand::dual_prox(const Point& x, double sigma, std::span<double> q) const {
    const double w = weight(x);
    double n2 = 0.0;
    for (double v : q) n2 += v * v;
    const double nq = std::sqrt(n2);
    if (kind_ == IntegrandKind::TV) {
        if (nq > w)
            for (double& v : q) v *= w / nq;
        return;
    }
    if (nq == 0.0) return;
    // Moreau: q - sigma prox_{f/sigma}(q/sigma), prox radial with lambda = w / sigma.
    const double y = nq / sigma;
    const double r = radial_prox(y, w / sigma);
    const double scale = 1.0 - sigma * r / nq;
    for (double& v : q) v *= scale;
}

Integrand parse_integrand_table(std::istream& in) {
    std::vector<double> t, g;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        std::istringstream is(raw);
        double a, b;
        if (!(is >> a)) {
            if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw ParseError("expected 't g'", line);
        }
        if (!(is >> b)) throw ParseError("expected 't g'", line);
        std::string extra;
        if (is >> extra) throw ParseError("trailing token '" + extra + "'", line);
        t.push_back(a);
        g.push_back(b);
    }
    try {
        return Integrand::table(std::move(t), std::move(g));
    } catch (const Error& e) {
        throw ParseError(e.what(), line);
    }
}

Integrand load_integrand(const std::string& source) {
    if (source == "tv") return Integrand::tv();
    if (source == "area") return Integrand::area();
    if (source.rfind("table:", 0) == 0) {
        std::ifstream in(source.substr(6));
        if (!in) throw ParseError("cannot open integrand table: " + source.substr(6));
        return parse_integrand_table(in);
    }
    throw ParseError("unknown integrand '" + source + "' (tv, area, table:<file>)");
}

}  // namespace bva
