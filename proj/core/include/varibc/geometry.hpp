#pragma once

#include <Eigen/Core>

#include <vector>

namespace varibc {

using Point = Eigen::Vector2d;
using Polygon = std::vector<Point>;

enum class RegionKind { solid, void_ };

struct NondesignRegion {
    Polygon polygon;
    RegionKind kind = RegionKind::solid;
};

/// Planar analysis domain: one outer boundary, optional holes and
/// non-design regions, plus the target element size.
struct DomainGeometry {
    Polygon outline;
    std::vector<Polygon> holes;
    std::vector<NondesignRegion> nondesign_regions;
    double element_size = 0.0;  // h [m]
};

/// Shoelace formula; positive for counterclockwise polygons.
double signed_area(const Polygon& poly);

/// Outline area minus hole areas.
double domain_area(const DomainGeometry& geometry);

/// Even-odd rule. Points exactly on an edge may go either way.
bool point_in_polygon(const Polygon& poly, const Point& p);

double distance_to_segment(const Point& p, const Point& a, const Point& b);
Point closest_point_on_segment(const Point& p, const Point& a, const Point& b);

/// Smallest distance from p to any edge of the closed polygon.
double distance_to_boundary(const Polygon& poly, const Point& p);

/// True when two non-adjacent edges cross or touch.
bool is_self_intersecting(const Polygon& poly);

/// Throws MeshError if the geometry is degenerate (fewer than three
/// vertices, zero area, self-intersecting outline, hole outside outline).
void validate(const DomainGeometry& geometry);

Polygon rectangle(double x0, double y0, double x1, double y1);

/// Half-thickness of the symmetric NACA 0012 section at abscissa x.
double naca0012_half_thickness(double chord, double x);

/// NACA 0012 outline, counterclockwise, truncated at leading_fraction * chord
/// with a vertical edge. Boundary points are spaced roughly `spacing` apart
/// along the arc (pass 0 for a default of chord/200).
DomainGeometry naca0012_outline(double chord, double leading_fraction, double spacing = 0.0);

}  // namespace varibc
