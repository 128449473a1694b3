#include "varibc/errors.hpp"
#include "varibc/evaluation.hpp"
#include "varibc/fixtures.hpp"
#include "varibc/problems.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace varibc;

namespace {

EquilibriumPath path_with_outputs(int node, int num_nodes, const std::vector<Eigen::Vector2d>& displacements) {
    EquilibriumPath p;
    for (const auto& d : displacements) {
        EquilibriumState s;
        s.U = Eigen::VectorXd::Zero(2 * num_nodes);
        s.U.segment<2>(2 * node) = d;
        p.states.push_back(s);
    }
    return p;
}

}  // namespace

TEST(Quantities, OutputDisplacement) {
    Eigen::VectorXd U = Eigen::VectorXd::Zero(10);
    EXPECT_EQ(u_out(U, {{3, 1.0}}), 0.0);
    U[3] = 0.01;
    EXPECT_DOUBLE_EQ(u_out(U, {{3, 1.0}}), 0.01);
    U[6] = -0.02;
    EXPECT_DOUBLE_EQ(u_out(U, {{3, 1.0}, {6, -1.0}}), 0.03);
}

TEST(Quantities, ForceDecomposition) {
    EXPECT_DOUBLE_EQ(f_in(3.0, 4.0, 0.0), 3.0);
    EXPECT_DOUBLE_EQ(f_p(3.0, 4.0, 0.0), 4.0);
    EXPECT_EQ(f_in(0.0, 0.0, 0.7), 0.0);
    EXPECT_EQ(f_p(0.0, 0.0, 0.7), 0.0);
    EXPECT_NEAR(f_in(3.0, 4.0, std::numbers::pi / 2), 4.0, 1e-15);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-10, 10), a(-4, 4);
    for (int t = 0; t < 1000; ++t) {
        const double lx = u(rng), ly = u(rng), th = a(rng);
        const double lhs = f_in(lx, ly, th) * f_in(lx, ly, th) + f_p(lx, ly, th) * f_p(lx, ly, th);
        EXPECT_LE(std::abs(lhs - (lx * lx + ly * ly)) / (lx * lx + ly * ly), 1e-12);
    }
}

TEST(Quantities, VolumeFractionWithNondesignRegion) {
    DomainGeometry g;
    g.outline = rectangle(0, 0, 0.04, 0.02);
    g.nondesign_regions = {{rectangle(0.03, 0.0, 0.04, 0.01), RegionKind::solid}};
    g.element_size = 2e-3;
    const MeshModel m = generate_mesh(g, 0.01);
    Eigen::VectorXd rho = Eigen::VectorXd::Zero(m.num_elements());
    double solid = 0.0;
    for (int e = 0; e < m.num_elements(); ++e)
        if (m.tag(e) == ElementTag::solid) {
            rho[e] = 1.0;
            solid += m.volume(e);
        }
    EXPECT_NEAR(volume_fraction(rho, m), solid / m.total_volume(), 1e-14);
}

TEST(Quantities, PathErrorCases) {
    const int nodes = 4, node = 2;
    const Point x0(0.1, 0.05);
    const EquilibriumPath exact = path_with_outputs(node, nodes, {{0.001, 0.0}, {0.002, 0.001}});
    const std::vector<PrecisionPoint> pts{{1, x0 + Point(0.001, 0.0)}, {2, x0 + Point(0.002, 0.001)}};
    EXPECT_EQ(path_error({&exact}, x0, node, pts), 0.0);

    const EquilibriumPath off = path_with_outputs(node, nodes, {{0.002, 0.0}});
    EXPECT_NEAR(path_error({&off}, x0, node, {{1, x0 + Point(0.001, 0.0)}}), 1e-6, 1e-18);

    // two load cases, brute-force double sum
    const EquilibriumPath a = path_with_outputs(node, nodes, {{0.0011, -0.0002}, {0.0023, 0.0008}});
    const EquilibriumPath b = path_with_outputs(node, nodes, {{0.0007, 0.0001}, {0.0019, 0.0013}});
    double oracle = 0.0;
    for (const EquilibriumPath* p : {&a, &b})
        for (const auto& pp : pts) {
            const Eigen::Vector2d pos = x0 + p->states[pp.step - 1].U.segment<2>(2 * node);
            oracle += (pos - pp.target).squaredNorm();
        }
    EXPECT_NEAR(path_error({&a, &b}, x0, node, pts), oracle, 1e-18);
    EXPECT_THROW(path_error({&a}, x0, node, {{3, x0}}), Error);
}

TEST(Quantities, LabelsAndScales) {
    EXPECT_EQ((QuantityRef{QuantityKind::u_out, 4, 0, 1.0}.label()), "u_out@4");
    EXPECT_EQ((QuantityRef{QuantityKind::f_p, 2, 2, -1.0}.label()), "-f_p@2#3");
    EXPECT_EQ((QuantityRef{QuantityKind::volume_fraction, 0, 0, 1.0}.label()), "vf");
    EXPECT_EQ((ConstraintSpec{{QuantityKind::f_in, 1, 0, 1.0}, -7.5, true}.scale()), 7.5);
    EXPECT_EQ((ConstraintSpec{{QuantityKind::f_in, 1, 0, 1.0}, 0.0, true}.scale()), 1.0);
}

TEST(Families, GripperParameters) {
    const ProblemSpec s = make_problem(ProblemFamily::gripper);
    EXPECT_EQ(s.k_out, 300.0);
    EXPECT_EQ(s.stroke, 5e-3);
    EXPECT_EQ(s.projection.r_min, 3e-3);
    EXPECT_EQ(s.projection.r, 2.5e-3);
    EXPECT_EQ(s.projection.beta, 500.0);
    EXPECT_EQ(s.move.rho, 0.2);
    EXPECT_EQ(s.move.support, 2.5e-3);
    EXPECT_EQ(s.move.load, 2.5e-3);
    EXPECT_NEAR(s.move.theta, 5.0 * std::numbers::pi / 180.0, 1e-15);
    EXPECT_EQ(s.steps(), 4);
    EXPECT_TRUE(s.objective.maximize);
    EXPECT_NO_THROW(s.validate());
    EXPECT_FALSE(s.fixed_bcs);
    EXPECT_TRUE(make_problem(ProblemFamily::gripper, true).fixed_bcs);
}

TEST(Families, BistableParameters) {
    const ProblemSpec s = make_problem(ProblemFamily::bistable_airfoil);
    EXPECT_EQ(s.stroke, 2.5e-3);
    EXPECT_EQ(s.k_out, 100.0);
    EXPECT_EQ(s.projection.r_min, 4e-3);
    EXPECT_EQ(s.projection.beta, 2000.0);
    EXPECT_EQ(s.move.rho, 0.05);
    EXPECT_EQ(s.move.support, 0.5e-3);
    EXPECT_EQ(s.move.load, 0.5e-3);
    EXPECT_NEAR(s.move.theta, std::numbers::pi / 180.0, 1e-15);
    EXPECT_EQ(s.steps(), 8);
    EXPECT_NO_THROW(s.validate());
}

TEST(Families, PathGenerationParameters) {
    const ProblemSpec line = make_problem(ProblemFamily::line_generator);
    EXPECT_EQ(line.stroke, 1e-2);
    ASSERT_EQ(line.num_load_cases(), 3);
    EXPECT_EQ(line.load_cases[1].norm(), 5.0);
    EXPECT_EQ(line.load_cases[2].norm(), 5.0);
    EXPECT_NO_THROW(line.validate());
    const ProblemSpec wing = make_problem(ProblemFamily::morphing_wing);
    EXPECT_EQ(wing.stroke, 2e-3);
    ASSERT_EQ(wing.num_load_cases(), 3);
    EXPECT_EQ(wing.load_cases[1].norm(), 1.0);
    EXPECT_EQ(wing.load_cases[2].norm(), 1.0);
    EXPECT_NO_THROW(wing.validate());
    EXPECT_THROW(make_problem(ProblemFamily::custom), ConfigValidationError);
}

TEST(Families, NamesRoundTrip) {
    for (auto f : {ProblemFamily::gripper, ProblemFamily::bistable_airfoil, ProblemFamily::line_generator,
                   ProblemFamily::morphing_wing, ProblemFamily::custom})
        EXPECT_EQ(parse_family(to_string(f)), f);
    EXPECT_THROW(parse_family("griper"), ConfigValidationError);
}

TEST(ProblemSpec, ValidateNamesInconsistentField) {
    ProblemSpec s = make_problem(ProblemFamily::gripper);
    s.objective.quantity.step = 9;
    try {
        s.validate();
        FAIL();
    } catch (const ConfigValidationError& e) {
        EXPECT_EQ(e.key, "objective");
    }
    s = make_problem(ProblemFamily::gripper);
    s.supports.clear();
    EXPECT_THROW(s.validate(), ConfigValidationError);
}

TEST(EvaluateQuantity, MatchesDirectFormulas) {
    const Fixture f = load_fixture("mini_gripper_100");
    const Evaluator ev(f.problem, f.mesh);
    const Evaluation e = ev.solve(f.design);
    ASSERT_FALSE(e.failed);
    const auto& st = e.paths[0].states[1];
    EXPECT_DOUBLE_EQ(ev.quantity({QuantityKind::u_out, 2, 0, 1.0}, e), u_out(st.U, ev.bound().selector));
    EXPECT_DOUBLE_EQ(ev.quantity({QuantityKind::f_in, 2, 0, 1.0}, e), f_in(st.lambda_x, st.lambda_y, f.design.theta));
    EXPECT_DOUBLE_EQ(ev.quantity({QuantityKind::f_p, 2, 0, -1.0}, e), -f_p(st.lambda_x, st.lambda_y, f.design.theta));
    EXPECT_DOUBLE_EQ(ev.quantity({QuantityKind::volume_fraction, 0, 0, 1.0}, e), volume_fraction(e.fields.rho_physical, f.mesh));
}
