// Conforming Delaunay mesher: boundary vertices at spacing <= h, a jittered
// equilateral lattice in the interior, Bowyer-Watson insertion, and
// midpoint splitting of any boundary segment missing from the triangulation.

#include "varibc/errors.hpp"
#include "varibc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace varibc {

namespace {

struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nbr;  // nbr[i] is across the edge opposite v[i]
    bool alive = true;
};

double orient(const Point& a, const Point& b, const Point& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
}

// > 0 when d lies inside the circumcircle of counterclockwise (a, b, c)
double incircle(const Point& a, const Point& b, const Point& c, const Point& d) {
    const double adx = a.x() - d.x(), ady = a.y() - d.y();
    const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
    const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

class Delaunay {
public:
    explicit Delaunay(const Point& lo, const Point& hi) {
        const Point c = 0.5 * (lo + hi);
        const double span = std::max(hi.x() - lo.x(), hi.y() - lo.y()) * 20.0 + 1.0;
        pts.emplace_back(c.x() - span, c.y() - span);
        pts.emplace_back(c.x() + span, c.y() - span);
        pts.emplace_back(c.x(), c.y() + span);
        tris.push_back({{0, 1, 2}, {-1, -1, -1}, true});
    }

    int insert(const Point& p) {
        const int idx = static_cast<int>(pts.size());
        pts.push_back(p);
        const int start = locate(p);
        if (start < 0) throw MeshError("mesher: point location failed");

        std::vector<int> cavity{start};
        std::vector<char> in_cavity(tris.size(), 0);
        in_cavity[start] = 1;
        for (std::size_t k = 0; k < cavity.size(); ++k) {
            const Tri& t = tris[cavity[k]];
            for (int n : t.nbr) {
                if (n < 0 || in_cavity[n]) continue;
                const Tri& u = tris[n];
                if (incircle(pts[u.v[0]], pts[u.v[1]], pts[u.v[2]], p) > 0.0) {
                    in_cavity[n] = 1;
                    cavity.push_back(n);
                }
            }
        }

        struct Boundary {
            int a, b, outside;
        };
        std::vector<Boundary> boundary;
        for (int ti : cavity) {
            const Tri& t = tris[ti];
            for (int i = 0; i < 3; ++i) {
                const int n = t.nbr[i];
                if (n >= 0 && in_cavity[n]) continue;
                boundary.push_back({t.v[(i + 1) % 3], t.v[(i + 2) % 3], n});
            }
        }
        for (int ti : cavity) tris[ti].alive = false;

        std::unordered_map<int, int> by_first, by_second;
        std::vector<int> created;
        for (const auto& e : boundary) {
            const int ti = static_cast<int>(tris.size());
            // (a, b, p): p opposite the outer edge
            tris.push_back({{e.a, e.b, idx}, {-1, -1, e.outside}, true});
            if (e.outside >= 0) {
                Tri& o = tris[e.outside];
                for (int i = 0; i < 3; ++i) {
                    const int oa = o.v[(i + 1) % 3], ob = o.v[(i + 2) % 3];
                    if ((oa == e.b && ob == e.a)) o.nbr[i] = ti;
                }
            }
            by_first[e.a] = ti;
            by_second[e.b] = ti;
            created.push_back(ti);
        }
        for (int ti : created) {
            Tri& t = tris[ti];
            // edge (b, p) opposite a; shared with triangle starting at b
            t.nbr[0] = by_first.at(t.v[1]);
            // edge (p, a) opposite b; shared with triangle ending at a
            t.nbr[1] = by_second.at(t.v[0]);
        }
        last_ = created.empty() ? 0 : created.back();
        return idx;
    }

    bool has_edge(int a, int b) const { return edges_.count(edge_key(a, b)) != 0; }

    void rebuild_edges() {
        edges_.clear();
        for (const auto& t : tris) {
            if (!t.alive) continue;
            for (int i = 0; i < 3; ++i) edges_.insert(edge_key(t.v[i], t.v[(i + 1) % 3]));
        }
    }

    std::vector<Point> pts;
    std::vector<Tri> tris;

private:
    int locate(const Point& p) {
        int t = last_;
        if (t < 0 || t >= static_cast<int>(tris.size()) || !tris[t].alive) t = first_alive();
        for (std::size_t guard = 0; guard < tris.size() + 16; ++guard) {
            const Tri& tr = tris[t];
            int next = -1;
            for (int i = 0; i < 3; ++i) {
                const Point& a = pts[tr.v[(i + 1) % 3]];
                const Point& b = pts[tr.v[(i + 2) % 3]];
                if (orient(a, b, p) < 0.0) {
                    next = tr.nbr[i];
                    break;
                }
            }
            if (next < 0) return t;
            t = next;
        }
        // walking can cycle on degenerate input; fall back to a scan
        for (int k = 0; k < static_cast<int>(tris.size()); ++k) {
            const Tri& tr = tris[k];
            if (!tr.alive) continue;
            if (orient(pts[tr.v[0]], pts[tr.v[1]], p) >= 0 && orient(pts[tr.v[1]], pts[tr.v[2]], p) >= 0 &&
                orient(pts[tr.v[2]], pts[tr.v[0]], p) >= 0)
                return k;
        }
        return -1;
    }

    int first_alive() const {
        for (int k = static_cast<int>(tris.size()) - 1; k >= 0; --k)
            if (tris[k].alive) return k;
        return -1;
    }

    int last_ = 0;
    std::unordered_set<std::uint64_t> edges_;
};

// Splits every edge so that no boundary segment is longer than h.
std::vector<Point> densify(const Polygon& poly, double h) {
    std::vector<Point> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % poly.size()];
        const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / h - 1e-9)));
        for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / n));
    }
    return out;
}

bool inside_domain(const DomainGeometry& g, const Point& p) {
    if (!point_in_polygon(g.outline, p)) return false;
    for (const auto& h : g.holes)
        if (point_in_polygon(h, p)) return false;
    return true;
}

double boundary_distance(const DomainGeometry& g, const Point& p) {
    double d = distance_to_boundary(g.outline, p);
    for (const auto& h : g.holes) d = std::min(d, distance_to_boundary(h, p));
    return d;
}

}  // namespace

MeshModel generate_mesh(const DomainGeometry& geometry, double thickness) {
    validate(geometry);
    const double h = geometry.element_size;

    std::vector<std::vector<Point>> loops;
    loops.push_back(densify(geometry.outline, h));
    for (const auto& hole : geometry.holes) loops.push_back(densify(hole, h));

    Point lo = geometry.outline.front(), hi = geometry.outline.front();
    for (const auto& p : geometry.outline) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    if (h > 0.5 * std::min(hi.x() - lo.x(), hi.y() - lo.y()) && h > (hi - lo).norm())
        throw MeshError("element size too large to resolve the outline");

    Delaunay dt(lo, hi);
    // boundary vertices, keeping their Delaunay indices for segment recovery
    std::vector<std::vector<int>> loop_ids;
    for (const auto& loop : loops) {
        std::vector<int> ids;
        for (const auto& p : loop) ids.push_back(dt.insert(p));
        loop_ids.push_back(std::move(ids));
    }

    // interior lattice with a tiny deterministic jitter against cocircularity
    std::mt19937_64 rng(0x5eed1234ULL);
    std::uniform_real_distribution<double> jitter(-1e-4 * h, 1e-4 * h);
    const double dy = h * std::sqrt(3.0) / 2.0;
    const int rows = static_cast<int>(std::ceil((hi.y() - lo.y()) / dy)) + 1;
    const int cols = static_cast<int>(std::ceil((hi.x() - lo.x()) / h)) + 2;
    for (int j = 0; j < rows; ++j) {
        for (int i = 0; i < cols; ++i) {
            const double jx = jitter(rng), jy = jitter(rng);
            Point p(lo.x() + (i + ((j % 2) ? 0.5 : 0.0)) * h + jx, lo.y() + j * dy + jy);
            if (!inside_domain(geometry, p)) continue;
            if (boundary_distance(geometry, p) < 0.6 * h) continue;
            dt.insert(p);
        }
    }

    // recover boundary segments by midpoint splitting
    for (int pass = 0; pass < 64; ++pass) {
        dt.rebuild_edges();
        bool changed = false;
        for (auto& ids : loop_ids) {
            std::vector<int> next;
            for (std::size_t k = 0; k < ids.size(); ++k) {
                const int a = ids[k], b = ids[(k + 1) % ids.size()];
                next.push_back(a);
                if (!dt.has_edge(a, b)) {
                    const Point m = 0.5 * (dt.pts[a] + dt.pts[b]);
                    next.push_back(dt.insert(m));
                    changed = true;
                }
            }
            ids = std::move(next);
        }
        if (!changed) break;
        if (pass == 63) throw MeshError("mesher: boundary recovery did not terminate");
    }

    // keep triangles inside the domain; drop super-triangle vertices
    std::vector<int> remap(dt.pts.size(), -1);
    std::vector<Point> nodes;
    std::vector<Triangle> tris;
    for (const auto& t : dt.tris) {
        if (!t.alive) continue;
        if (t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) continue;
        const Point c = (dt.pts[t.v[0]] + dt.pts[t.v[1]] + dt.pts[t.v[2]]) / 3.0;
        if (!inside_domain(geometry, c)) continue;
        if (orient(dt.pts[t.v[0]], dt.pts[t.v[1]], dt.pts[t.v[2]]) <= 0.0) continue;
        Triangle tri;
        for (int k = 0; k < 3; ++k) {
            int& r = remap[t.v[k]];
            if (r < 0) {
                r = static_cast<int>(nodes.size());
                nodes.push_back(dt.pts[t.v[k]]);
            }
            tri[k] = r;
        }
        tris.push_back(tri);
    }
    if (tris.empty()) throw MeshError("mesher produced no elements");

    // a few Laplacian passes on interior nodes, rejected if any element degrades badly
    {
        std::vector<char> on_boundary(nodes.size(), 0);
        std::unordered_map<std::uint64_t, int> edge_count;
        for (const auto& t : tris)
            for (int k = 0; k < 3; ++k) ++edge_count[edge_key(t[k], t[(k + 1) % 3])];
        for (const auto& [key, count] : edge_count) {
            if (count == 1) {
                on_boundary[key >> 32] = 1;
                on_boundary[key & 0xffffffffULL] = 1;
            }
        }
        std::vector<std::vector<int>> incident(nodes.size());
        for (int e = 0; e < static_cast<int>(tris.size()); ++e)
            for (int v : tris[e]) incident[v].push_back(e);
        auto area = [&](const Triangle& t) {
            return orient(nodes[t[0]], nodes[t[1]], nodes[t[2]]);
        };
        for (int pass = 0; pass < 4; ++pass) {
            for (std::size_t v = 0; v < nodes.size(); ++v) {
                if (on_boundary[v] || incident[v].empty()) continue;
                Point avg = Point::Zero();
                int cnt = 0;
                for (int e : incident[v])
                    for (int w : tris[e])
                        if (w != static_cast<int>(v)) {
                            avg += nodes[w];
                            ++cnt;
                        }
                avg /= cnt;
                const Point old = nodes[v];
                double min_before = std::numeric_limits<double>::infinity();
                for (int e : incident[v]) min_before = std::min(min_before, area(tris[e]));
                nodes[v] = avg;
                double min_after = std::numeric_limits<double>::infinity();
                for (int e : incident[v]) min_after = std::min(min_after, area(tris[e]));
                if (!(min_after > 0.5 * min_before)) nodes[v] = old;
            }
        }
    }

    std::vector<ElementTag> tags(tris.size(), ElementTag::designable);
    std::vector<int> region_hits(geometry.nondesign_regions.size(), 0);
    for (std::size_t e = 0; e < tris.size(); ++e) {
        const Point c = (nodes[tris[e][0]] + nodes[tris[e][1]] + nodes[tris[e][2]]) / 3.0;
        for (std::size_t r = 0; r < geometry.nondesign_regions.size(); ++r) {
            const auto& region = geometry.nondesign_regions[r];
            if (point_in_polygon(region.polygon, c)) {
                tags[e] = region.kind == RegionKind::solid ? ElementTag::solid : ElementTag::void_;
                ++region_hits[r];
            }
        }
    }
    for (std::size_t r = 0; r < region_hits.size(); ++r)
        if (region_hits[r] == 0)
            throw MeshError("element size too large to resolve non-design region " + std::to_string(r));

    return MeshModel(std::move(nodes), std::move(tris), std::move(tags), thickness);
}

}  // namespace varibc
