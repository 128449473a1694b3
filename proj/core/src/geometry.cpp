#include "varibc/geometry.hpp"

#include "varibc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace varibc {

double signed_area(const Polygon& poly) {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % n];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

double domain_area(const DomainGeometry& g) {
    double a = std::abs(signed_area(g.outline));
    for (const auto& h : g.holes) a -= std::abs(signed_area(h));
    return a;
}

bool point_in_polygon(const Polygon& poly, const Point& p) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = poly[i];
        const Point& b = poly[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double xc = a.x() + (p.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (p.x() < xc) inside = !inside;
        }
    }
    return inside;
}

Point closest_point_on_segment(const Point& p, const Point& a, const Point& b) {
    const Point ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return a;
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return a + t * ab;
}

double distance_to_segment(const Point& p, const Point& a, const Point& b) {
    return (p - closest_point_on_segment(p, a, b)).norm();
}

double distance_to_boundary(const Polygon& poly, const Point& p) {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i)
        d = std::min(d, distance_to_segment(p, poly[i], poly[(i + 1) % poly.size()]));
    return d;
}

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_intersect(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
    const double d1 = cross(q2 - q1, p1 - q1);
    const double d2 = cross(q2 - q1, p2 - q1);
    const double d3 = cross(p2 - p1, q1 - p1);
    const double d4 = cross(p2 - p1, q2 - p1);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on_segment = [](const Point& a, const Point& b, const Point& c) {
        return std::min(a.x(), b.x()) <= c.x() && c.x() <= std::max(a.x(), b.x()) &&
               std::min(a.y(), b.y()) <= c.y() && c.y() <= std::max(a.y(), b.y());
    };
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

}  // namespace

bool is_self_intersecting(const Polygon& poly) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // adjacent edges share a vertex
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
                return true;
        }
    }
    return false;
}

void validate(const DomainGeometry& g) {
    if (g.outline.size() < 3) throw MeshError("outline needs at least three vertices");
    if (std::abs(signed_area(g.outline)) <= 0.0) throw MeshError("outline has zero area");
    if (is_self_intersecting(g.outline)) throw MeshError("outline is self-intersecting");
    if (!(g.element_size > 0.0)) throw MeshError("element size must be positive");
    for (std::size_t k = 0; k < g.holes.size(); ++k) {
        const auto& h = g.holes[k];
        if (h.size() < 3 || signed_area(h) == 0.0)
            throw MeshError("hole " + std::to_string(k) + " is degenerate");
        for (const auto& p : h)
            if (!point_in_polygon(g.outline, p) && distance_to_boundary(g.outline, p) > 1e-12)
                throw MeshError("hole " + std::to_string(k) + " is not inside the outline");
    }
}

Polygon rectangle(double x0, double y0, double x1, double y1) {
    return {Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1)};
}

double naca0012_half_thickness(double chord, double x) {
    const double s = std::clamp(x / chord, 0.0, 1.0);
    return 5.0 * 0.12 * chord *
           (0.2969 * std::sqrt(s) - 0.1260 * s - 0.3516 * s * s + 0.2843 * s * s * s -
            0.1015 * s * s * s * s);
}

DomainGeometry naca0012_outline(double chord, double leading_fraction, double spacing) {
    if (!(chord > 0.0) || !(leading_fraction > 0.0) || leading_fraction > 1.0)
        throw MeshError("naca0012_outline: need chord > 0 and 0 < leading_fraction <= 1");
    if (spacing <= 0.0) spacing = chord / 200.0;
    const double xend = leading_fraction * chord;

    // dense cosine-spaced sampling of the upper surface, then thinned by arc length
    const int dense = 4000;
    std::vector<Point> upper;
    upper.reserve(dense + 1);
    for (int i = 0; i <= dense; ++i) {
        const double x = 0.5 * xend * (1.0 - std::cos(std::numbers::pi * i / dense));
        upper.emplace_back(x, naca0012_half_thickness(chord, x));
    }
    std::vector<double> arc(upper.size(), 0.0);
    for (std::size_t i = 1; i < upper.size(); ++i)
        arc[i] = arc[i - 1] + (upper[i] - upper[i - 1]).norm();
    const int segments = std::max(4, static_cast<int>(std::ceil(arc.back() / spacing)));
    std::vector<Point> thinned;
    thinned.push_back(upper.front());
    std::size_t k = 0;
    for (int s = 1; s < segments; ++s) {
        const double target = arc.back() * s / segments;
        while (arc[k + 1] < target) ++k;
        const double t = (target - arc[k]) / (arc[k + 1] - arc[k]);
        const double x = upper[k].x() + t * (upper[k + 1].x() - upper[k].x());
        thinned.emplace_back(x, naca0012_half_thickness(chord, x));
    }
    thinned.push_back(upper.back());

    DomainGeometry g;
    g.element_size = spacing;
    // counterclockwise: trailing edge upper -> leading edge -> trailing edge lower
    for (auto it = thinned.rbegin(); it != thinned.rend(); ++it) g.outline.push_back(*it);
    for (std::size_t i = 1; i < thinned.size(); ++i)
        g.outline.emplace_back(thinned[i].x(), -thinned[i].y());

    // the vertical closing edge can be much longer than the spacing when truncated
    const double edge = 2.0 * thinned.back().y();
    const int nedge = static_cast<int>(std::ceil(edge / spacing));
    for (int i = 1; i < nedge; ++i)
        g.outline.emplace_back(xend, -thinned.back().y() + edge * i / nedge);
    return g;
}

}  // namespace varibc
