#include "varibc/mesh.hpp"

#include "varibc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace varibc {

Eigen::Vector2d ShapeEval::interpolate(const Eigen::VectorXd& u) const {
    Eigen::Vector2d r = Eigen::Vector2d::Zero();
    for (int a = 0; a < 3; ++a) {
        r.x() += values[a] * u[2 * nodes[a]];
        r.y() += values[a] * u[2 * nodes[a] + 1];
    }
    return r;
}

Eigen::Vector2d ShapeEval::gradient_x(const Eigen::VectorXd& u) const {
    Eigen::Vector2d r = Eigen::Vector2d::Zero();
    for (int a = 0; a < 3; ++a) {
        r.x() += dndx[a] * u[2 * nodes[a]];
        r.y() += dndx[a] * u[2 * nodes[a] + 1];
    }
    return r;
}

Eigen::Vector2d ShapeEval::gradient_y(const Eigen::VectorXd& u) const {
    Eigen::Vector2d r = Eigen::Vector2d::Zero();
    for (int a = 0; a < 3; ++a) {
        r.x() += dndy[a] * u[2 * nodes[a]];
        r.y() += dndy[a] * u[2 * nodes[a] + 1];
    }
    return r;
}

MeshModel::MeshModel(std::vector<Point> nodes, std::vector<Triangle> triangles,
                     std::vector<ElementTag> tags, double thickness)
    : nodes_(std::move(nodes)),
      triangles_(std::move(triangles)),
      tags_(std::move(tags)),
      thickness_(thickness) {
    if (!(thickness_ > 0.0)) throw MeshError("thickness must be positive");
    if (tags_.size() != triangles_.size())
        throw MeshError("every element needs exactly one tag");
    const int nn = num_nodes();
    const int ne = num_elements();
    centroids_.resize(ne);
    areas_.resize(ne);
    gradients_.resize(ne);
    designable_index_.assign(ne, -1);

    std::set<std::array<int, 3>> seen;
    for (int e = 0; e < ne; ++e) {
        const Triangle& t = triangles_[e];
        for (int v : t)
            if (v < 0 || v >= nn)
                throw MeshError("element " + std::to_string(e) + " references node out of range");
        std::array<int, 3> key = t;
        std::sort(key.begin(), key.end());
        if (key[0] == key[1] || key[1] == key[2])
            throw MeshError("element " + std::to_string(e) + " repeats a node");
        if (!seen.insert(key).second)
            throw MeshError("duplicate triangle at element " + std::to_string(e));

        const Point& p1 = nodes_[t[0]];
        const Point& p2 = nodes_[t[1]];
        const Point& p3 = nodes_[t[2]];
        const double twice = (p2.x() - p1.x()) * (p3.y() - p1.y()) -
                             (p3.x() - p1.x()) * (p2.y() - p1.y());
        if (!(twice > 0.0))
            throw MeshError("element " + std::to_string(e) + " has non-positive signed area");
        areas_[e] = 0.5 * twice;
        centroids_[e] = (p1 + p2 + p3) / 3.0;
        auto& g = gradients_[e];
        g(0, 0) = (p2.y() - p3.y()) / twice;
        g(0, 1) = (p3.y() - p1.y()) / twice;
        g(0, 2) = (p1.y() - p2.y()) / twice;
        g(1, 0) = (p3.x() - p2.x()) / twice;
        g(1, 1) = (p1.x() - p3.x()) / twice;
        g(1, 2) = (p2.x() - p1.x()) / twice;
        total_area_ += areas_[e];
        if (tags_[e] == ElementTag::designable) {
            designable_index_[e] = static_cast<int>(designable_.size());
            designable_.push_back(e);
        }
    }
    build_locator();
}

void MeshModel::build_locator() {
    if (nodes_.empty() || triangles_.empty()) return;
    Point lo = nodes_.front(), hi = nodes_.front();
    for (const auto& p : nodes_) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double mean_area = total_area_ / num_elements();
    cell_ = std::max(2.0 * std::sqrt(mean_area), 1e-12);
    grid_min_ = lo;
    nx_ = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / cell_)) + 1);
    ny_ = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / cell_)) + 1);
    buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (int e = 0; e < num_elements(); ++e) {
        const Triangle& t = triangles_[e];
        Point a = nodes_[t[0]], b = nodes_[t[0]];
        for (int v : t) {
            a = a.cwiseMin(nodes_[v]);
            b = b.cwiseMax(nodes_[v]);
        }
        const int i0 = std::clamp(static_cast<int>((a.x() - grid_min_.x()) / cell_) - 1, 0, nx_ - 1);
        const int i1 = std::clamp(static_cast<int>((b.x() - grid_min_.x()) / cell_) + 1, 0, nx_ - 1);
        const int j0 = std::clamp(static_cast<int>((a.y() - grid_min_.y()) / cell_) - 1, 0, ny_ - 1);
        const int j1 = std::clamp(static_cast<int>((b.y() - grid_min_.y()) / cell_) + 1, 0, ny_ - 1);
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) buckets_[static_cast<std::size_t>(j) * nx_ + i].push_back(e);
    }
}

std::vector<int> MeshModel::candidates(const Point& p) const {
    if (buckets_.empty()) return {};
    const double fx = (p.x() - grid_min_.x()) / cell_;
    const double fy = (p.y() - grid_min_.y()) / cell_;
    if (!(fx >= 0.0) || !(fy >= 0.0) || fx >= nx_ || fy >= ny_) return {};
    return buckets_[static_cast<std::size_t>(fy) * nx_ + static_cast<std::size_t>(fx)];
}

std::array<double, 3> MeshModel::barycentric(int e, const Point& p) const {
    const Triangle& t = triangles_[e];
    const Point& p1 = nodes_[t[0]];
    const Point& p2 = nodes_[t[1]];
    const Point& p3 = nodes_[t[2]];
    const double det = (p2.y() - p3.y()) * (p1.x() - p3.x()) + (p3.x() - p2.x()) * (p1.y() - p3.y());
    const double l1 = ((p2.y() - p3.y()) * (p.x() - p3.x()) + (p3.x() - p2.x()) * (p.y() - p3.y())) / det;
    const double l2 = ((p3.y() - p1.y()) * (p.x() - p3.x()) + (p1.x() - p3.x()) * (p.y() - p3.y())) / det;
    return {l1, l2, 1.0 - l1 - l2};
}

std::optional<LocatedPoint> MeshModel::try_locate(const Point& p) const {
    constexpr double tol = 1e-12;
    // bucket lists are filled in ascending element order
    for (int e : candidates(p)) {
        const auto b = barycentric(e, p);
        if (b[0] >= -tol && b[1] >= -tol && b[2] >= -tol) return LocatedPoint{e, b};
    }
    return std::nullopt;
}

LocatedPoint MeshModel::locate(const Point& p) const {
    auto r = try_locate(p);
    if (!r) throw PointOutsideDomain(p.x(), p.y());
    return *r;
}

ShapeEval MeshModel::shape_values_at(const Point& p) const {
    const LocatedPoint loc = locate(p);
    ShapeEval s;
    s.element = loc.element;
    const auto& g = gradients_[loc.element];
    for (int a = 0; a < 3; ++a) {
        s.nodes[a] = triangles_[loc.element][a];
        s.values[a] = loc.bary[a];
        s.dndx[a] = g(0, a);
        s.dndy[a] = g(1, a);
    }
    return s;
}

int MeshModel::nearest_node(const Point& p) const {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int i = 0; i < num_nodes(); ++i) {
        const double d = (nodes_[i] - p).squaredNorm();
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

Point MeshModel::clamp_inside(const Point& p) const {
    if (try_locate(p)) return p;
    int best_e = -1;
    Point best_q = p;
    double bd = std::numeric_limits<double>::infinity();
    for (int e = 0; e < num_elements(); ++e) {
        const Triangle& t = triangles_[e];
        for (int k = 0; k < 3; ++k) {
            const Point q = closest_point_on_segment(p, nodes_[t[k]], nodes_[t[(k + 1) % 3]]);
            const double d = (q - p).squaredNorm();
            if (d < bd) {
                bd = d;
                best_e = e;
                best_q = q;
            }
        }
    }
    // nudge toward the centroid so the point is strictly interior
    const Point c = centroids_[best_e];
    for (double t = 1e-6; t <= 1.0; t *= 4.0) {
        const Point q = best_q + t * (c - best_q);
        if (try_locate(q)) return q;
    }
    return c;
}

}  // namespace varibc
