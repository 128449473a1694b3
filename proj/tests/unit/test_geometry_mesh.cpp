#include "varibc/errors.hpp"
#include "varibc/geometry.hpp"
#include "varibc/mesh.hpp"
#include "varibc/problems.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace varibc;

namespace {

double mesh_area(const MeshModel& m) {
    double a = 0.0;
    for (int e = 0; e < m.num_elements(); ++e) a += m.area(e);
    return a;
}

// Independent scan over all elements, no bucket grid.
int brute_force_locate(const MeshModel& m, const Point& p) {
    for (int e = 0; e < m.num_elements(); ++e) {
        const auto& t = m.triangle(e);
        const Point a = m.node(t[0]), b = m.node(t[1]), c = m.node(t[2]);
        auto cross = [](const Point& u, const Point& v) { return u.x() * v.y() - u.y() * v.x(); };
        const double s0 = cross(b - a, p - a), s1 = cross(c - b, p - b), s2 = cross(a - c, p - c);
        const double tol = -1e-14;
        if (s0 >= tol && s1 >= tol && s2 >= tol) return e;
    }
    return -1;
}

double naca_polynomial(double xc) {
    return 5.0 * 0.12 *
           (0.2969 * std::sqrt(xc) - 0.1260 * xc - 0.3516 * xc * xc + 0.2843 * xc * xc * xc -
            0.1015 * xc * xc * xc * xc);
}

}  // namespace

TEST(Geometry, ShoelaceAreaOfUnitSquare) {
    EXPECT_DOUBLE_EQ(signed_area(rectangle(0, 0, 1, 1)), 1.0);
    Polygon cw = rectangle(0, 0, 1, 1);
    std::reverse(cw.begin(), cw.end());
    EXPECT_DOUBLE_EQ(signed_area(cw), -1.0);
}

TEST(Geometry, ValidateRejectsDegenerateOutlines) {
    DomainGeometry g;
    g.element_size = 0.1;
    g.outline = {{0, 0}, {1, 0}};
    EXPECT_THROW(validate(g), MeshError);
    g.outline = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};  // bow tie
    EXPECT_THROW(validate(g), MeshError);
    g.outline = rectangle(0, 0, 1, 1);
    g.holes = {rectangle(2, 2, 3, 3)};
    EXPECT_THROW(validate(g), MeshError);
}

TEST(Mesher, UnitSquareCoversArea) {
    DomainGeometry g;
    g.outline = rectangle(0, 0, 1, 1);
    g.element_size = 0.5;
    const MeshModel m = generate_mesh(g, 0.01);
    EXPECT_GE(m.num_elements(), 4);
    EXPECT_NEAR(mesh_area(m), 1.0, 1e-9);
}

TEST(Mesher, AreaMatchesShoelaceWithHole) {
    DomainGeometry g;
    g.outline = {{0, 0}, {0.1, 0}, {0.1, 0.04}, {0.05, 0.07}, {0, 0.04}};
    g.holes = {rectangle(0.02, 0.01, 0.04, 0.03)};
    g.element_size = 4e-3;
    const MeshModel m = generate_mesh(g, 0.01);
    const double expected = std::abs(signed_area(g.outline)) - std::abs(signed_area(g.holes[0]));
    EXPECT_LE(std::abs(mesh_area(m) - expected) / expected, 1e-6);
    EXPECT_NEAR(m.total_area(), mesh_area(m), 1e-15);
}

TEST(Mesher, NondesignRegionsAreTagged) {
    DomainGeometry g;
    g.outline = rectangle(0, 0, 0.1, 0.05);
    g.nondesign_regions = {{rectangle(0.08, 0.0, 0.1, 0.01), RegionKind::solid},
                           {rectangle(0.0, 0.04, 0.02, 0.05), RegionKind::void_}};
    g.element_size = 2.5e-3;
    const MeshModel m = generate_mesh(g, 0.01);
    int solid = 0, void_ = 0;
    for (int e = 0; e < m.num_elements(); ++e) {
        const Point c = m.centroid(e);
        if (m.tag(e) == ElementTag::solid) {
            ++solid;
            EXPECT_TRUE(point_in_polygon(g.nondesign_regions[0].polygon, c));
        } else if (m.tag(e) == ElementTag::void_) {
            ++void_;
            EXPECT_TRUE(point_in_polygon(g.nondesign_regions[1].polygon, c));
        }
    }
    EXPECT_GT(solid, 0);
    EXPECT_GT(void_, 0);
    EXPECT_EQ(m.num_designable(), m.num_elements() - solid - void_);
}

TEST(Mesher, GripperElementCountAtPublishedSize) {
    const ProblemSpec s = make_problem(ProblemFamily::gripper);
    const MeshModel m = generate_mesh(s.geometry, s.thickness);
    EXPECT_GE(m.num_elements(), 7400);
    EXPECT_LE(m.num_elements(), 12300);
}

TEST(Naca0012, HalfThicknessMatchesPolynomial) {
    EXPECT_NEAR(naca0012_half_thickness(1.0, 0.3), 0.0600172, 1e-6);
    EXPECT_NEAR(naca0012_half_thickness(1.0, 0.3), naca_polynomial(0.3), 1e-12);
    double thickest = 0.0;
    for (int i = 0; i <= 10000; ++i) thickest = std::max(thickest, 2.0 * naca0012_half_thickness(1.0, i / 1e4));
    EXPECT_NEAR(thickest, 0.12, 1e-3);
    EXPECT_LE(naca0012_half_thickness(1.0, 1.0), 1.3e-3);
}

TEST(Naca0012, OutlineIsCounterclockwiseAndValid) {
    DomainGeometry g = naca0012_outline(0.2, 1.0, 2e-3);
    g.element_size = 2e-3;
    EXPECT_NO_THROW(validate(g));
    EXPECT_GT(signed_area(g.outline), 0.0);
}

class LocateTest : public ::testing::Test {
protected:
    void SetUp() override {
        DomainGeometry g;
        g.outline = {{0, 0}, {0.1, 0}, {0.1, 0.05}, {0.03, 0.08}, {0, 0.05}};
        g.element_size = 6e-3;
        mesh = generate_mesh(g, 0.01);
    }
    MeshModel mesh;
};

TEST_F(LocateTest, CentroidHasEqualWeights) {
    for (int e = 0; e < mesh.num_elements(); e += 7) {
        const LocatedPoint lp = mesh.locate(mesh.centroid(e));
        EXPECT_EQ(lp.element, e);
        for (double w : lp.bary) EXPECT_NEAR(w, 1.0 / 3.0, 1e-12);
    }
}

TEST_F(LocateTest, VertexGoesToLowestIncidentElement) {
    for (int n = 0; n < mesh.num_nodes(); n += 5) {
        int lowest = -1;
        for (int e = 0; e < mesh.num_elements() && lowest < 0; ++e)
            for (int k : mesh.triangle(e))
                if (k == n) lowest = e;
        const LocatedPoint lp = mesh.locate(mesh.node(n));
        EXPECT_EQ(lp.element, lowest);
        int unit = 0;
        for (int k = 0; k < 3; ++k)
            if (mesh.triangle(lp.element)[k] == n && std::abs(lp.bary[k] - 1.0) < 1e-12) ++unit;
        EXPECT_EQ(unit, 1);
    }
}

TEST_F(LocateTest, RandomPointsReconstructFromBarycentrics) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ux(0.0, 0.1), uy(0.0, 0.08);
    int tested = 0;
    while (tested < 1000) {
        const Point p(ux(rng), uy(rng));
        const int oracle = brute_force_locate(mesh, p);
        const auto lp = mesh.try_locate(p);
        if (oracle < 0) {
            EXPECT_FALSE(lp.has_value());
            continue;
        }
        ASSERT_TRUE(lp.has_value());
        const auto& t = mesh.triangle(lp->element);
        Point q = Point::Zero();
        for (int k = 0; k < 3; ++k) q += lp->bary[k] * mesh.node(t[k]);
        EXPECT_LE((q - p).norm(), 1e-10);
        ++tested;
    }
}

TEST_F(LocateTest, OutsidePointThrows) {
    EXPECT_THROW(mesh.locate(Point(0.2, 0.2)), PointOutsideDomain);
    EXPECT_FALSE(mesh.try_locate(Point(-1e-3, 0.01)).has_value());
}

TEST_F(LocateTest, ShapeValuesAtNodeSelectThatNode) {
    const int n = mesh.num_nodes() / 2;
    const ShapeEval s = mesh.shape_values_at(mesh.node(n));
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(s.values[k], s.nodes[k] == n ? 1.0 : 0.0, 1e-12);
}

TEST_F(LocateTest, LinearFieldIsReproduced) {
    const double a = 0.3, b = -0.7, c = 1.1, d = 0.25;
    Eigen::VectorXd U(mesh.num_dofs());
    for (int i = 0; i < mesh.num_nodes(); ++i) {
        const Point& x = mesh.node(i);
        U[2 * i] = a * x.x() + b * x.y();
        U[2 * i + 1] = c * x.x() + d * x.y();
    }
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> ux(0.0, 0.1), uy(0.0, 0.05);
    for (int t = 0; t < 100; ++t) {
        const Point p(ux(rng), uy(rng));
        const ShapeEval s = mesh.shape_values_at(p);
        const Eigen::Vector2d u = s.interpolate(U);
        EXPECT_NEAR(u.x(), a * p.x() + b * p.y(), 1e-14);
        EXPECT_NEAR(u.y(), c * p.x() + d * p.y(), 1e-14);
        EXPECT_NEAR(s.gradient_x(U).x(), a, 1e-10);
        EXPECT_NEAR(s.gradient_x(U).y(), c, 1e-10);
        EXPECT_NEAR(s.gradient_y(U).x(), b, 1e-10);
        EXPECT_NEAR(s.gradient_y(U).y(), d, 1e-10);
    }
}

TEST(MeshModel, RejectsInvertedAndDuplicateElements) {
    const std::vector<Point> nodes{{0, 0}, {1, 0}, {0, 1}};
    EXPECT_THROW(MeshModel(nodes, {{0, 2, 1}}, {ElementTag::designable}, 1.0), MeshError);
    EXPECT_THROW(MeshModel(nodes, {{0, 1, 2}, {1, 2, 0}}, {ElementTag::designable, ElementTag::designable}, 1.0),
                 MeshError);
    EXPECT_THROW(MeshModel(nodes, {{0, 1, 5}}, {ElementTag::designable}, 1.0), MeshError);
}

TEST(MeshModel, ClampInsideReturnsInteriorPoint) {
    const MeshModel m({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}},
                      {ElementTag::designable, ElementTag::designable}, 1.0);
    const Point inside(0.3, 0.4);
    EXPECT_EQ(m.clamp_inside(inside), inside);
    const Point q = m.clamp_inside(Point(1.5, 0.5));
    EXPECT_TRUE(m.try_locate(q).has_value());
    EXPECT_NEAR(q.x(), 1.0, 1e-6);
}
