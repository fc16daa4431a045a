#include "bva/domain.hpp"

#include "bva/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

namespace bva {

namespace {

Point make_point(std::initializer_list<double> v) {
    Point p(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) p[i++] = x;
    return p;
}

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                    const Eigen::Vector2d& d) {
    const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

}  // namespace

Domain Domain::disk(Eigen::Vector2d center, double radius) {
    if (!(radius > 0.0)) throw DimensionError("disk radius must be positive");
    Domain d;
    d.kind_ = DomainKind::Disk;
    d.dim_ = 2;
    d.center_ = make_point({center.x(), center.y()});
    d.radius_ = radius;
    return d;
}

Domain Domain::box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    if (lo.size() != hi.size() || lo.size() < 1 || lo.size() > 3)
        throw DimensionError("box corners must have equal dimension 1..3");
    for (Eigen::Index a = 0; a < lo.size(); ++a)
        if (!(hi[a] > lo[a])) throw DimensionError("box must have positive extent in every axis");
    Domain d;
    d.kind_ = DomainKind::Box;
    d.dim_ = static_cast<int>(lo.size());
    d.lo_ = lo;
    d.hi_ = hi;
    d.center_ = 0.5 * (lo + hi);
    return d;
}

Domain Domain::polygon(std::vector<Eigen::Vector2d> vertices) {
    const std::size_t m = vertices.size();
    if (m < 3) throw DimensionError("polygon needs at least 3 vertices");
    double area2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) area2 += cross(vertices[i], vertices[(i + 1) % m]);
    if (std::abs(area2) < 1e-14) throw DomainError("polygon has zero area");
    if (area2 < 0.0) std::reverse(vertices.begin(), vertices.end());
    for (std::size_t i = 0; i < m; ++i) {
        if ((vertices[(i + 1) % m] - vertices[i]).norm() < 1e-14) throw DomainError("polygon has a repeated vertex");
        for (std::size_t k = i + 1; k < m; ++k) {
            if (k == i + 1 || (i == 0 && k == m - 1)) continue;
            if (segments_cross(vertices[i], vertices[(i + 1) % m], vertices[k], vertices[(k + 1) % m]))
                throw DomainError("polygon edges " + std::to_string(i) + " and " + std::to_string(k) + " intersect");
        }
    }
    Domain d;
    d.kind_ = DomainKind::Polygon;
    d.dim_ = 2;
    d.vertices_ = std::move(vertices);
    Eigen::Vector2d c = Eigen::Vector2d::Zero();
    for (const auto& v : d.vertices_) c += v;
    c /= static_cast<double>(m);
    d.center_ = make_point({c.x(), c.y()});
    return d;
}

Domain Domain::complement() const {
    Domain d = *this;
    d.exterior_ = !exterior_;
    return d;
}

double Domain::raw_distance(const Point& x, Point* nearest, Point* normal) const {
    if (x.size() != dim_) throw DimensionError("point dimension does not match domain");
    switch (kind_) {
        case DomainKind::Disk: {
            Point d = x - center_;
            const double r = d.norm();
            Point u = r > 1e-300 ? Point(d / r) : make_point({1.0, 0.0});
            if (nearest) *nearest = center_ + radius_ * u;
            if (normal) *normal = u;
            return r - radius_;
        }
        case DomainKind::Box: {
            Point p = x.cwiseMax(lo_).cwiseMin(hi_);
            const double out = (x - p).norm();
            int clamped = 0, axis = 0;
            for (int a = 0; a < dim_; ++a)
                if (x[a] != p[a]) ++clamped, axis = a;
            if (out > 0.0) {
                if (nearest) *nearest = p;
                if (normal) {
                    if (clamped == 1) {
                        *normal = Point::Zero(dim_);
                        (*normal)[axis] = x[axis] > hi_[axis] ? 1.0 : -1.0;
                    } else {
                        *normal = (x - p) / out;
                    }
                }
                return out;
            }
            double best = std::numeric_limits<double>::infinity();
            int best_axis = 0;
            bool upper = false;
            for (int a = 0; a < dim_; ++a) {
                if (x[a] - lo_[a] < best) best = x[a] - lo_[a], best_axis = a, upper = false;
                if (hi_[a] - x[a] < best) best = hi_[a] - x[a], best_axis = a, upper = true;
            }
            if (nearest) {
                *nearest = x;
                (*nearest)[best_axis] = upper ? hi_[best_axis] : lo_[best_axis];
            }
            if (normal) {
                *normal = Point::Zero(dim_);
                (*normal)[best_axis] = upper ? 1.0 : -1.0;
            }
            return -best;
        }
        case DomainKind::Polygon: {
            const Eigen::Vector2d q(x[0], x[1]);
            const std::size_t m = vertices_.size();
            double best = std::numeric_limits<double>::infinity();
            Eigen::Vector2d best_p = vertices_[0];
            std::size_t best_edge = 0;
            double best_t = 0.0;
            int winding = 0;
            for (std::size_t i = 0; i < m; ++i) {
                const Eigen::Vector2d& a = vertices_[i];
                const Eigen::Vector2d& b = vertices_[(i + 1) % m];
                const Eigen::Vector2d e = b - a;
                const double t = std::clamp((q - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
                const Eigen::Vector2d p = a + t * e;
                const double dist = (q - p).norm();
                if (dist < best) best = dist, best_p = p, best_edge = i, best_t = t;
                if (a.y() <= q.y()) {
                    if (b.y() > q.y() && cross(e, q - a) > 0) ++winding;
                } else if (b.y() <= q.y() && cross(e, q - a) < 0) {
                    --winding;
                }
            }
            const bool inside = winding != 0;
            if (nearest) *nearest = make_point({best_p.x(), best_p.y()});
            if (normal) {
                auto edge_normal = [&](std::size_t i) {
                    const Eigen::Vector2d e = vertices_[(i + 1) % m] - vertices_[i];
                    return Eigen::Vector2d(e.y(), -e.x()).normalized();
                };
                Eigen::Vector2d nv = edge_normal(best_edge);
                const bool at_vertex = best_t <= 0.0 || best_t >= 1.0;
                if (at_vertex) {
                    if (!inside && best > 1e-14) {
                        nv = (q - best_p) / best;
                    } else {
                        const std::size_t other = best_t <= 0.0 ? (best_edge + m - 1) % m : (best_edge + 1) % m;
                        nv = (nv + edge_normal(other)).normalized();
                    }
                }
                *normal = make_point({nv.x(), nv.y()});
            }
            return inside ? -best : best;
        }
    }
    return 0.0;
}

double Domain::signed_distance(const Point& x) const {
    const double d = raw_distance(x, nullptr, nullptr);
    return exterior_ ? -d : d;
}

Point Domain::nearest_point(const Point& x) const {
    Point p;
    raw_distance(x, &p, nullptr);
    return p;
}

Point Domain::outer_normal(const Point& x) const {
    Point nu;
    raw_distance(x, nullptr, &nu);
    return exterior_ ? Point(-nu) : nu;
}

Point Domain::distance_gradient(const Point& x) const {
    Point p, nu;
    const double d = raw_distance(x, &p, &nu);
    const double gap = (x - p).norm();
    Point g = gap > 1e-13 ? Point((d > 0 ? 1.0 : -1.0) * (x - p) / gap) : nu;
    return exterior_ ? Point(-g) : g;
}

double Domain::boundary_measure() const {
    switch (kind_) {
        case DomainKind::Disk:
            return 2.0 * std::numbers::pi * radius_;
        case DomainKind::Box: {
            const Point e = hi_ - lo_;
            if (dim_ == 1) return 2.0;
            if (dim_ == 2) return 2.0 * (e[0] + e[1]);
            return 2.0 * (e[0] * e[1] + e[1] * e[2] + e[0] * e[2]);
        }
        case DomainKind::Polygon: {
            double s = 0.0;
            for (std::size_t i = 0; i < vertices_.size(); ++i)
                s += (vertices_[(i + 1) % vertices_.size()] - vertices_[i]).norm();
            return s;
        }
    }
    return 0.0;
}

double Domain::feature_size() const {
    switch (kind_) {
        case DomainKind::Disk:
            return radius_;
        case DomainKind::Box:
            return (hi_ - lo_).minCoeff();
        case DomainKind::Polygon: {
            double s = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < vertices_.size(); ++i)
                s = std::min(s, (vertices_[(i + 1) % vertices_.size()] - vertices_[i]).norm());
            return s;
        }
    }
    return 0.0;
}

int Domain::coarsest_level() const {
    const double f = feature_size();
    int j = -30;
    while (4.0 * std::ldexp(1.0, -j) >= f) ++j;
    return j;
}

std::pair<Point, Point> Domain::bounding_box() const {
    switch (kind_) {
        case DomainKind::Disk:
            return {center_.array() - radius_, center_.array() + radius_};
        case DomainKind::Box:
            return {lo_, hi_};
        case DomainKind::Polygon: {
            Eigen::Vector2d lo = vertices_[0], hi = vertices_[0];
            for (const auto& v : vertices_) lo = lo.cwiseMin(v), hi = hi.cwiseMax(v);
            return {make_point({lo.x(), lo.y()}), make_point({hi.x(), hi.y()})};
        }
    }
    return {};
}

BoundaryMesh Domain::boundary_mesh(double spacing) const {
    if (!(spacing > 0.0)) throw DimensionError("boundary spacing must be positive");
    std::vector<double> pts, nrm, wts;
    auto push = [&](const Point& p, const Point& nu, double w) {
        pts.insert(pts.end(), p.data(), p.data() + dim_);
        nrm.insert(nrm.end(), nu.data(), nu.data() + dim_);
        wts.push_back(w);
    };
    auto push_segment = [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& nu) {
        const double len = (b - a).norm();
        const int m = std::max(1, static_cast<int>(std::ceil(len / spacing)));
        for (int k = 0; k < m; ++k) {
            const Eigen::Vector2d p = a + (k + 0.5) / m * (b - a);
            push(make_point({p.x(), p.y()}), make_point({nu.x(), nu.y()}), len / m);
        }
    };
    switch (kind_) {
        case DomainKind::Disk: {
            const int m = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius_ / spacing)));
            for (int k = 0; k < m; ++k) {
                const double th = 2.0 * std::numbers::pi * (k + 0.5) / m;
                const Point nu = make_point({std::cos(th), std::sin(th)});
                push(center_ + radius_ * nu, nu, 2.0 * std::numbers::pi * radius_ / m);
            }
            break;
        }
        case DomainKind::Polygon: {
            const std::size_t m = vertices_.size();
            for (std::size_t i = 0; i < m; ++i) {
                const Eigen::Vector2d a = vertices_[i], b = vertices_[(i + 1) % m];
                const Eigen::Vector2d e = b - a;
                push_segment(a, b, Eigen::Vector2d(e.y(), -e.x()).normalized());
            }
            break;
        }
        case DomainKind::Box: {
            if (dim_ == 1) {
                push(make_point({lo_[0]}), make_point({-1.0}), 1.0);
                push(make_point({hi_[0]}), make_point({1.0}), 1.0);
            } else if (dim_ == 2) {
                const Eigen::Vector2d a(lo_[0], lo_[1]), b(hi_[0], lo_[1]), c(hi_[0], hi_[1]), d(lo_[0], hi_[1]);
                push_segment(a, b, {0.0, -1.0});
                push_segment(b, c, {1.0, 0.0});
                push_segment(c, d, {0.0, 1.0});
                push_segment(d, a, {-1.0, 0.0});
            } else {
                for (int axis = 0; axis < 3; ++axis) {
                    const int u = (axis + 1) % 3, v = (axis + 2) % 3;
                    const double lu = hi_[u] - lo_[u], lv = hi_[v] - lo_[v];
                    const int mu = std::max(1, static_cast<int>(std::ceil(lu / spacing)));
                    const int mv = std::max(1, static_cast<int>(std::ceil(lv / spacing)));
                    for (int side = 0; side < 2; ++side) {
                        Point nu = Point::Zero(3);
                        nu[axis] = side ? 1.0 : -1.0;
                        for (int i = 0; i < mu; ++i)
                            for (int k = 0; k < mv; ++k) {
                                Point p(3);
                                p[axis] = side ? hi_[axis] : lo_[axis];
                                p[u] = lo_[u] + (i + 0.5) * lu / mu;
                                p[v] = lo_[v] + (k + 0.5) * lv / mv;
                                push(p, nu, lu * lv / (mu * mv));
                            }
                    }
                }
            }
            break;
        }
    }
    BoundaryMesh mesh;
    const Eigen::Index M = static_cast<Eigen::Index>(wts.size());
    mesh.points = Eigen::Map<Eigen::MatrixXd>(pts.data(), dim_, M);
    mesh.normals = Eigen::Map<Eigen::MatrixXd>(nrm.data(), dim_, M);
    mesh.weights = Eigen::Map<Eigen::VectorXd>(wts.data(), M);
    if (exterior_) mesh.normals = -mesh.normals;
    return mesh;
}

std::vector<double> Domain::volume_fractions(const Grid& grid, int sub) const {
    if (grid.dim() != dim_) throw DimensionError("grid dimension does not match domain");
    if (sub < 1) throw DimensionError("sub-sampling must be positive");
    const double h = grid.spacing();
    const double half_diag = 0.5 * h * std::sqrt(static_cast<double>(dim_));
    std::vector<double> frac(grid.size(), 0.0);
    int total = 1;
    for (int a = 0; a < dim_; ++a) total *= sub;
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const Point x = grid.center(c);
        const double d = signed_distance(x);
        if (d <= -half_diag) {
            frac[c] = 1.0;
            continue;
        }
        if (d >= half_diag) continue;
        int inside = 0;
        Point y(dim_);
        for (int s = 0; s < total; ++s) {
            int r = s;
            for (int a = 0; a < dim_; ++a) {
                y[a] = x[a] - 0.5 * h + (r % sub + 0.5) * h / sub;
                r /= sub;
            }
            if (signed_distance(y) < 0.0) ++inside;
        }
        frac[c] = static_cast<double>(inside) / total;
    }
    return frac;
}

std::vector<char> Domain::cell_mask(const Grid& grid) const {
    std::vector<char> mask(grid.size(), 0);
    for (std::size_t c = 0; c < grid.size(); ++c) mask[c] = contains(grid.center(c));
    return mask;
}

std::string Domain::describe() const {
    std::ostringstream os;
    os << std::setprecision(17);
    switch (kind_) {
        case DomainKind::Disk:
            os << "disk(center=" << center_[0] << ' ' << center_[1] << ", radius=" << radius_ << ')';
            break;
        case DomainKind::Box:
            os << "box(lo=" << lo_.transpose() << ", hi=" << hi_.transpose() << ')';
            break;
        case DomainKind::Polygon:
            os << "polygon(" << vertices_.size() << " vertices)";
            break;
    }
    if (exterior_) os << " exterior";
    return os.str();
}

namespace {

std::vector<double> parse_numbers(const std::string& text, int line) {
    std::istringstream is(text);
    std::vector<double> v;
    std::string tok;
    while (is >> tok) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ParseError("not a number: '" + tok + "'", line);
        }
    }
    return v;
}

}  // namespace

Domain parse_domain(std::istream& in) {
    std::string kind;
    std::vector<double> center, lo, hi;
    double radius = -1.0;
    std::vector<Eigen::Vector2d> vertices;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = raw.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value", line);
        std::string key = raw.substr(0, eq);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t") + 1);
        const std::string value = raw.substr(eq + 1);
        if (key == "kind") {
            std::istringstream is(value);
            is >> kind;
            if (kind != "disk" && kind != "box" && kind != "polygon") throw ParseError("unknown kind '" + kind + "'", line);
        } else if (key == "center") {
            center = parse_numbers(value, line);
        } else if (key == "radius") {
            const auto v = parse_numbers(value, line);
            if (v.size() != 1) throw ParseError("radius takes one number", line);
            radius = v[0];
        } else if (key == "lo") {
            lo = parse_numbers(value, line);
        } else if (key == "hi") {
            hi = parse_numbers(value, line);
        } else if (key == "vertex") {
            const auto v = parse_numbers(value, line);
            if (v.size() != 2) throw ParseError("vertex takes two numbers", line);
            vertices.emplace_back(v[0], v[1]);
        } else {
            throw ParseError("unknown key '" + key + "'", line);
        }
    }
    if (kind.empty()) throw ParseError("missing kind=", line);
    try {
        if (kind == "disk") {
            if (center.size() != 2) throw ParseError("disk needs center=x y", line);
            if (radius <= 0.0) throw ParseError("disk needs a positive radius=", line);
            return Domain::disk({center[0], center[1]}, radius);
        }
        if (kind == "box") {
            if (lo.empty() || lo.size() != hi.size()) throw ParseError("box needs lo= and hi= of equal length", line);
            return Domain::box(Eigen::Map<Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size())),
                               Eigen::Map<Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size())));
        }
        return Domain::polygon(vertices);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what(), line);
    }
}

Domain parse_domain_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open domain file: " + path.string());
    return parse_domain(in);
}

Domain load_domain(std::string_view source) {
    std::string s(source);
    if (s.rfind("builtin:", 0) == 0) s = s.substr(8);
    if (s == "disk") return Domain::disk({0.0, 0.0}, 1.0);
    if (s == "square") return Domain::box(Eigen::Vector2d(-1.0, -1.0), Eigen::Vector2d(1.0, 1.0));
    return parse_domain_file(std::string(source));
}

std::string format_domain(const Domain& d) {
    std::ostringstream os;
    os << std::setprecision(17);
    switch (d.kind()) {
        case DomainKind::Disk:
            os << "kind=disk\ncenter=" << d.center()[0] << ' ' << d.center()[1] << "\nradius=" << d.radius() << '\n';
            break;
        case DomainKind::Box:
            os << "kind=box\nlo=" << d.lo().transpose() << "\nhi=" << d.hi().transpose() << '\n';
            break;
        case DomainKind::Polygon:
            os << "kind=polygon\n";
            for (const auto& v : d.vertices()) os << "vertex=" << v.x() << ' ' << v.y() << '\n';
            break;
    }
    return os.str();
}

}  // namespace bva
