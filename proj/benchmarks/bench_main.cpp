#include "varibc/config.hpp"
#include "varibc/evaluation.hpp"
#include "varibc/fixtures.hpp"
#include "varibc/mma.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace varibc;

namespace {

struct Gripper {
    ProblemSpec spec;
    MeshModel mesh;
    DesignVector design;

    explicit Gripper(double h) : spec(make_problem(ProblemFamily::gripper)) {
        spec.geometry.element_size = h;
        mesh = build_mesh(spec);
        design = spec.initial_design(mesh);
    }
};

const Gripper& gripper(double h) {
    static const Gripper g3(3e-3), g15(1.5e-3);
    return h > 2e-3 ? g3 : g15;
}

double size_of(int64_t arg) { return arg * 1e-4; }

}  // namespace

static void BM_Assemble(benchmark::State& state) {
    const Gripper& g = gripper(size_of(state.range(0)));
    const Evaluator ev(g.spec, g.mesh);
    const FieldState fs = ev.field_model().evaluate(g.design);
    const Eigen::VectorXd U = Eigen::VectorXd::Zero(2 * g.mesh.num_nodes());
    for (auto _ : state) benchmark::DoNotOptimize(ev.assembler().assemble(U, fs, ev.bound().counters[0]));
    state.counters["elements"] = g.mesh.num_elements();
}
BENCHMARK(BM_Assemble)->Arg(30)->Arg(15)->Unit(benchmark::kMillisecond);

static void BM_EquilibriumPath(benchmark::State& state) {
    const Gripper& g = gripper(size_of(state.range(0)));
    const Evaluator ev(g.spec, g.mesh);
    for (auto _ : state) benchmark::DoNotOptimize(ev.solve(g.design));
    state.counters["elements"] = g.mesh.num_elements();
}
BENCHMARK(BM_EquilibriumPath)->Arg(30)->Arg(15)->Unit(benchmark::kMillisecond);

static void BM_AdjointGradients(benchmark::State& state) {
    const Gripper& g = gripper(size_of(state.range(0)));
    const Evaluator ev(g.spec, g.mesh);
    const Evaluation e = ev.solve(g.design);
    std::vector<QuantityRef> qs{g.spec.objective.quantity};
    for (const auto& c : g.spec.constraints) qs.push_back(c.quantity);
    for (auto _ : state) benchmark::DoNotOptimize(ev.gradients(qs, e));
    state.counters["quantities"] = static_cast<double>(qs.size());
}
BENCHMARK(BM_AdjointGradients)->Arg(30)->Arg(15)->Unit(benchmark::kMillisecond);

static void BM_MmaUpdate(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0)), m = 4;
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 0.5), df0 = Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
    Eigen::VectorXd fval = Eigen::VectorXd::NullaryExpr(m, [&] { return u(rng); });
    Eigen::MatrixXd dfdx = Eigen::MatrixXd::NullaryExpr(m, n, [&] { return u(rng); });
    const Eigen::VectorXd lo = Eigen::VectorXd::Zero(n), hi = Eigen::VectorXd::Ones(n),
                          move = Eigen::VectorXd::Constant(n, 0.1);
    for (auto _ : state) {
        Mma mma(n, m);
        benchmark::DoNotOptimize(mma.update(x, df0, fval, dfdx, lo, hi, move));
    }
}
BENCHMARK(BM_MmaUpdate)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
