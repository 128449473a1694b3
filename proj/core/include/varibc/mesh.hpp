#pragma once

#include "varibc/geometry.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace varibc {

enum class ElementTag : std::uint8_t { designable = 0, solid = 1, void_ = 2 };

using Triangle = std::array<int, 3>;

/// Barycentric location of a point inside the mesh.
struct LocatedPoint {
    int element = -1;
    std::array<double, 3> bary{};  // weights of the element's three nodes
};

/// Linear shape functions evaluated at an arbitrary point: the sparse row
/// pair N(p) mapping nodal DOFs to (ux, uy), plus the constant spatial
/// gradients of the containing element.
struct ShapeEval {
    int element = -1;
    std::array<int, 3> nodes{};
    std::array<double, 3> values{};
    std::array<double, 3> dndx{};
    std::array<double, 3> dndy{};

    /// Interpolated (ux, uy) of a nodal displacement vector.
    Eigen::Vector2d interpolate(const Eigen::VectorXd& u) const;
    /// Interpolated spatial gradient d(ux,uy)/dx.
    Eigen::Vector2d gradient_x(const Eigen::VectorXd& u) const;
    Eigen::Vector2d gradient_y(const Eigen::VectorXd& u) const;
};

/// Immutable plane-stress mesh of 3-node triangles.
///
/// Node i owns DOFs 2i (ux) and 2i+1 (uy). Triangles are stored
/// counterclockwise; the constructor rejects inverted or duplicate elements.
class MeshModel {
public:
    MeshModel() = default;
    MeshModel(std::vector<Point> nodes, std::vector<Triangle> triangles,
              std::vector<ElementTag> tags, double thickness);

    int num_nodes() const { return static_cast<int>(nodes_.size()); }
    int num_elements() const { return static_cast<int>(triangles_.size()); }
    int num_dofs() const { return 2 * num_nodes(); }
    double thickness() const { return thickness_; }

    const Point& node(int i) const { return nodes_[i]; }
    const std::vector<Point>& nodes() const { return nodes_; }
    const Triangle& triangle(int e) const { return triangles_[e]; }
    const std::vector<Triangle>& triangles() const { return triangles_; }
    ElementTag tag(int e) const { return tags_[e]; }
    const std::vector<ElementTag>& tags() const { return tags_; }

    const Point& centroid(int e) const { return centroids_[e]; }
    double area(int e) const { return areas_[e]; }
    double volume(int e) const { return areas_[e] * thickness_; }
    double total_area() const { return total_area_; }
    double total_volume() const { return total_area_ * thickness_; }

    /// Row 0: dN_a/dx, row 1: dN_a/dy for the element's three nodes.
    const Eigen::Matrix<double, 2, 3>& shape_gradients(int e) const { return gradients_[e]; }

    /// Indices of designable elements in ascending order.
    const std::vector<int>& designable_elements() const { return designable_; }
    /// Position of element e in designable_elements(), or -1.
    int designable_index(int e) const { return designable_index_[e]; }
    int num_designable() const { return static_cast<int>(designable_.size()); }

    /// Lowest-index element containing p, or nullopt.
    std::optional<LocatedPoint> try_locate(const Point& p) const;
    /// Throws PointOutsideDomain.
    LocatedPoint locate(const Point& p) const;
    ShapeEval shape_values_at(const Point& p) const;

    int nearest_node(const Point& p) const;
    /// p itself when inside; otherwise the nearest point of the mesh pulled
    /// slightly toward the interior of the closest element.
    Point clamp_inside(const Point& p) const;

    std::array<double, 3> barycentric(int e, const Point& p) const;

private:
    void build_locator();
    std::vector<int> candidates(const Point& p) const;

    std::vector<Point> nodes_;
    std::vector<Triangle> triangles_;
    std::vector<ElementTag> tags_;
    double thickness_ = 1.0;

    std::vector<Point> centroids_;
    std::vector<double> areas_;
    std::vector<Eigen::Matrix<double, 2, 3>> gradients_;
    std::vector<int> designable_;
    std::vector<int> designable_index_;
    double total_area_ = 0.0;

    // uniform bucket grid for point location
    Point grid_min_ = Point::Zero();
    double cell_ = 1.0;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<int>> buckets_;
};

/// Conforming Delaunay-style triangulation of the domain with elements of
/// roughly size h. Elements whose centroid falls inside a non-design polygon
/// receive its tag (later regions take precedence).
MeshModel generate_mesh(const DomainGeometry& geometry, double thickness);

}  // namespace varibc
