#include "varibc/errors.hpp"
#include "varibc/fixtures.hpp"
#include "varibc/optimizer.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace varibc;

namespace {

IterationRecord record(int it, bool feasible, double mean_drho, bool failed = false, double objective = 0.0) {
    IterationRecord r;
    r.iteration = it;
    r.feasible = feasible;
    r.mean_drho = mean_drho;
    r.failed = failed;
    r.objective = objective;
    return r;
}

std::vector<IterationRecord> history_ending(IterationRecord last) {
    std::vector<IterationRecord> h{record(0, false, 0.3), record(1, true, 0.01)};
    h.push_back(last);
    return h;
}

int count_columns(const std::string& line) { return static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1; }

}  // namespace

TEST(ConvergenceCheck, FeasibleAndSmallChangeStops) {
    EXPECT_TRUE(convergence_check(history_ending(record(2, true, 5e-5)), 1e-4));
}

TEST(ConvergenceCheck, ViolatedConstraintContinues) {
    EXPECT_FALSE(convergence_check(history_ending(record(2, false, 5e-5)), 1e-4));
}

TEST(ConvergenceCheck, LargeChangeContinues) {
    EXPECT_FALSE(convergence_check(history_ending(record(2, true, 2e-4)), 1e-4));
}

TEST(ConvergenceCheck, FailedOrInitialIterateContinues) {
    EXPECT_FALSE(convergence_check(history_ending(record(2, true, 5e-5, true)), 1e-4));
    EXPECT_FALSE(convergence_check({record(0, true, 0.0)}, 1e-4));
    EXPECT_THROW(convergence_check({}, 1e-4), Error);
}

TEST(Oscillation, AlternatingObjectiveIsFlagged) {
    std::vector<IterationRecord> h;
    for (int k = 0; k < 10; ++k) h.push_back(record(k, true, 0.0, false, k % 2 ? 1.0 : 2.0));
    EXPECT_TRUE(detect_oscillation(h, 10));
    EXPECT_FALSE(detect_oscillation(std::vector<IterationRecord>(h.begin(), h.begin() + 5), 10));
}

TEST(Oscillation, MonotoneObjectiveIsNotFlagged) {
    std::vector<IterationRecord> h;
    for (int k = 0; k < 12; ++k) h.push_back(record(k, true, 0.0, false, 1.0 / (k + 1)));
    EXPECT_FALSE(detect_oscillation(h, 10));
}

TEST(DesignBox, FixedBoundaryConditionsAreInactive) {
    const Fixture f = load_fixture("mini_gripper_100");
    ProblemSpec s = f.problem;
    const DesignLayout L = f.design.layout();
    DesignBox b = design_box(s, L);
    EXPECT_TRUE(b.active[L.xs(0)]);
    EXPECT_TRUE(b.active[L.theta()]);
    EXPECT_EQ(b.move[0], s.move.rho);
    s.support_fixed = {true, false};
    b = design_box(s, L);
    EXPECT_FALSE(b.active[L.xs(0)]);
    EXPECT_FALSE(b.active[L.ys(0)]);
    EXPECT_TRUE(b.active[L.xs(1)]);
    s.fixed_bcs = true;
    b = design_box(s, L);
    for (int k = L.num_rho; k < L.size(); ++k) EXPECT_FALSE(b.active[k]);
    for (int k = 0; k < L.num_rho; ++k) EXPECT_TRUE(b.active[k]);
}

TEST(RunOptimization, ZeroBudgetReturnsInitialDesign) {
    const Fixture f = load_fixture("mini_gripper_100");
    const Evaluator ev(f.problem, f.mesh);
    OptimizerConfig cfg;
    cfg.max_iterations = 0;
    const OptimizationResult r = run_optimization(ev, cfg);
    ASSERT_EQ(r.history.size(), 1u);
    EXPECT_EQ(r.reason, StopReason::max_iterations);
    const DesignVector d0 = f.problem.initial_design(f.mesh);
    EXPECT_EQ(r.design.flatten(), d0.flatten());
    cfg.max_iterations = -1;
    EXPECT_THROW(run_optimization(ev, cfg), ConfigValidationError);
}

TEST(RunOptimization, FixedBoundaryConditionsStayBitIdentical) {
    Fixture f = load_fixture("mini_gripper_100");
    f.problem.fixed_bcs = true;
    const Evaluator ev(f.problem, f.mesh);
    OptimizerConfig cfg;
    cfg.max_iterations = 3;
    const OptimizationResult r = run_optimization(ev, cfg);
    const DesignVector d0 = f.problem.initial_design(f.mesh);
    for (const auto& rec : r.history) {
        ASSERT_EQ(rec.supports.size(), d0.supports.size());
        for (size_t i = 0; i < d0.supports.size(); ++i) EXPECT_EQ(rec.supports[i], d0.supports[i]);
        EXPECT_EQ(rec.load, d0.load);
        EXPECT_EQ(rec.theta, d0.theta);
    }
    EXPECT_NE(r.design.rho, d0.rho);
}

TEST(RunOptimization, VariableBoundaryConditionsRespectMoveLimits) {
    const Fixture f = load_fixture("mini_gripper_100");
    const Evaluator ev(f.problem, f.mesh);
    OptimizerConfig cfg;
    cfg.max_iterations = 3;
    const OptimizationResult r = run_optimization(ev, cfg);
    ASSERT_GE(r.history.size(), 2u);
    for (size_t k = 1; k < r.history.size(); ++k) {
        const auto& a = r.history[k - 1];
        const auto& b = r.history[k];
        EXPECT_LE(b.max_drho, f.problem.move.rho + 1e-12);
        for (size_t i = 0; i < a.supports.size(); ++i)
            EXPECT_LE((b.supports[i] - a.supports[i]).cwiseAbs().maxCoeff(), f.problem.move.support * (1 + 1e-12));
        EXPECT_LE((b.load - a.load).cwiseAbs().maxCoeff(), f.problem.move.load * (1 + 1e-12));
        EXPECT_LE(std::abs(b.theta - a.theta), f.problem.move.theta * (1 + 1e-12));
    }
}

TEST(RunOptimization, HistoryIsReproducibleAndWellFormed) {
    const Fixture f = load_fixture("mini_gripper_100");
    const Evaluator ev(f.problem, f.mesh);
    OptimizerConfig cfg;
    cfg.max_iterations = 3;
    std::ostringstream a, b;
    int calls = 0;
    run_optimization(ev, cfg, &a, [&](const IterationRecord&, const Evaluation&) { ++calls; });
    run_optimization(ev, cfg, &b);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(calls, 4);

    std::istringstream in(a.str());
    std::string header, line;
    std::getline(in, header);
    const int cols = count_columns(header);
    EXPECT_EQ(cols, 11 + static_cast<int>(f.problem.constraints.size()) + 2 * 2 + 3);
    int rows = 0;
    while (std::getline(in, line)) {
        EXPECT_EQ(count_columns(line), cols);
        ++rows;
    }
    EXPECT_EQ(rows, 4);
}
