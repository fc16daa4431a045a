#pragma once

#include "bva/discrete.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace bva {

enum class DomainKind { Disk, Box, Polygon };

/// Boundary samples with arc-length (surface) weights and outer normals.
struct BoundaryMesh {
    Eigen::MatrixXd points;   ///< n x M
    Eigen::MatrixXd normals;  ///< n x M, unit outer normals
    Eigen::VectorXd weights;  ///< M
    std::size_t size() const noexcept { return static_cast<std::size_t>(weights.size()); }
    double measure() const { return weights.sum(); }
};

/// Bounded domain (disk, axis-aligned box, simple polygon) or its exterior.
///
/// Signed distance is negative inside. For the exterior view every quantity refers to
/// the complement: the sign flips and normals point into the original domain.
class Domain {
public:
    static Domain disk(Eigen::Vector2d center, double radius);
    static Domain box(Eigen::VectorXd lo, Eigen::VectorXd hi);
    /// Vertices in order (either orientation); must be simple.
    static Domain polygon(std::vector<Eigen::Vector2d> vertices);

    DomainKind kind() const noexcept { return kind_; }
    int dim() const noexcept { return dim_; }
    bool exterior() const noexcept { return exterior_; }
    /// The complement view (shares geometry, flips orientation).
    Domain complement() const;

    double signed_distance(const Point& x) const;
    bool contains(const Point& x) const { return signed_distance(x) < 0.0; }
    /// Nearest point of the boundary.
    Point nearest_point(const Point& x) const;
    /// Outer normal of this domain at the boundary point nearest to x.
    Point outer_normal(const Point& x) const;
    /// Unit gradient of the signed distance at x (the outer normal on the boundary).
    Point distance_gradient(const Point& x) const;

    /// Exact perimeter / surface area.
    double boundary_measure() const;
    /// Smallest geometric length scale (radius, shortest side, shortest edge).
    double feature_size() const;
    /// Smallest j with 4 * 2^-j below feature_size().
    int coarsest_level() const;
    /// Axis-aligned bounding box of the boundary.
    std::pair<Point, Point> bounding_box() const;

    /// Midpoint rule along the boundary with element size at most `spacing`.
    BoundaryMesh boundary_mesh(double spacing) const;

    /// Fraction of each grid cell inside the domain, sub x ... x sub samples on cut cells.
    std::vector<double> volume_fractions(const Grid& grid, int sub = 8) const;
    /// Cells whose centre lies inside.
    std::vector<char> cell_mask(const Grid& grid) const;

    const std::vector<Eigen::Vector2d>& vertices() const noexcept { return vertices_; }
    const Point& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }
    const Point& lo() const noexcept { return lo_; }
    const Point& hi() const noexcept { return hi_; }

    std::string describe() const;

private:
    double raw_distance(const Point& x, Point* nearest, Point* normal) const;

    DomainKind kind_ = DomainKind::Disk;
    int dim_ = 2;
    bool exterior_ = false;
    Point center_;
    double radius_ = 1.0;
    Point lo_, hi_;
    std::vector<Eigen::Vector2d> vertices_;  // counter-clockwise
};

/// Domain text: "kind=disk|box|polygon", then "center=x y" and "radius=r", or
/// "lo=..." and "hi=...", or one "vertex=x y" line per polygon vertex. '#' starts a comment.
Domain parse_domain(std::istream& in);
Domain parse_domain_file(const std::filesystem::path& path);
/// "disk", "square" (unit disk, [-1,1]^2), or a domain file path.
Domain load_domain(std::string_view source);
std::string format_domain(const Domain& d);

}  // namespace bva
