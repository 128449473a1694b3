// Acceptance suite: one PASS/FAIL line per criterion.
//
//   varibc_acceptance          run all criteria
//   varibc_acceptance 3 5      run selected criteria

#include "varibc/config.hpp"
#include "varibc/design_field.hpp"
#include "varibc/errors.hpp"
#include "varibc/evaluation.hpp"
#include "varibc/fixtures.hpp"
#include "varibc/material.hpp"
#include "varibc/optimizer.hpp"
#include "varibc/output.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace varibc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string sci(double v) { return fmt("%.2e", v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path work_dir(const std::string& name) {
    const fs::path p = fs::path(VARIBC_WORK_DIR) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

// ---------------------------------------------------------------------------
// 1. adjoint gradients against central differences

Outcome gradient_exactness() {
    const auto t0 = std::chrono::steady_clock::now();
    const Fixture f = load_fixture("mini_gripper_100");
    const Evaluator ev(f.problem, f.mesh);
    const Evaluation e = ev.solve(f.design);
    if (e.failed) return {false, "fixture path failed: " + e.failure};

    const std::vector<QuantityRef> qs{{QuantityKind::u_out, 2, 0, 1.0},
                                      {QuantityKind::f_in, 2, 0, 1.0},
                                      {QuantityKind::f_p, 1, 0, 1.0},
                                      {QuantityKind::volume_fraction, 0, 0, 1.0},
                                      {QuantityKind::path_error, 0, 0, 1.0}};
    const auto grads = ev.gradients(qs, e);
    const DesignLayout L = f.design.layout();
    const Eigen::VectorXd z0 = f.design.flatten();

    struct Probe {
        int index;
        double step;
        double tol;
    };
    std::vector<Probe> probes;
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> pick(0, L.num_rho - 1);
    std::vector<int> dens;
    while (dens.size() < 12) {
        const int j = pick(rng);
        if (std::find(dens.begin(), dens.end(), j) == dens.end()) dens.push_back(j);
    }
    for (int j : dens) probes.push_back({j, 1e-6, 1e-4});
    probes.push_back({L.theta(), 1e-6, 1e-4});
    for (int i = 0; i < L.num_supports; ++i) {
        probes.push_back({L.xs(i), 1e-7, 1e-3});
        probes.push_back({L.ys(i), 1e-7, 1e-3});
    }
    probes.push_back({L.xf(), 1e-7, 1e-3});
    probes.push_back({L.yf(), 1e-7, 1e-3});

    // Entries more than six orders of magnitude below the largest gradient
    // entry of the same quantity sit under central-difference round-off;
    // they are compared against 1e-6 of that entry.
    std::vector<double> worst(qs.size(), 0.0);
    double worst_ratio = 0.0;
    for (const auto& p : probes) {
        Eigen::VectorXd zp = z0, zm = z0;
        zp[p.index] += p.step;
        zm[p.index] -= p.step;
        const Evaluation ep = ev.solve(DesignVector::unflatten(zp, L));
        const Evaluation em = ev.solve(DesignVector::unflatten(zm, L));
        if (ep.failed || em.failed) return {false, "perturbed path failed at entry " + std::to_string(p.index)};
        for (size_t q = 0; q < qs.size(); ++q) {
            const double fd = (ev.quantity(qs[q], ep) - ev.quantity(qs[q], em)) / (2.0 * p.step);
            const double floor = 1e-6 * grads[q].lpNorm<Eigen::Infinity>();
            const double scale = std::max(std::abs(fd), floor);
            const double err = scale > 0.0 ? std::abs(grads[q][p.index] - fd) / scale : 0.0;
            worst[q] = std::max(worst[q], err);
            worst_ratio = std::max(worst_ratio, err / p.tol);
        }
    }
    const double elapsed = seconds_since(t0);
    std::string detail = std::to_string(probes.size()) + " entries (12 densities, theta, 6 coordinates); worst rel err";
    for (size_t q = 0; q < qs.size(); ++q) detail += " " + qs[q].label() + "=" + sci(worst[q]);
    detail += "; " + fmt("%.1f s", elapsed);
    return {worst_ratio <= 1.0 && elapsed <= 60.0, detail};
}

// ---------------------------------------------------------------------------
// 2. material consistency

DeformationState state_from_C(const Matrix2& C) {
    const Eigen::SelfAdjointEigenSolver<Matrix2> es(C);
    return DeformationState(es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                            es.eigenvectors().transpose());
}

Outcome material_consistency() {
    const MaterialParams mp = MaterialParams::from_poisson(0.49);
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(-0.4, 0.4), jdist(0.5, 2.0);
    double worst_s = 0.0, worst_d = 0.0, jmin = 10.0, jmax = 0.0;
    const double h = 1e-6;
    for (int t = 0; t < 100; ++t) {
        Matrix2 F;
        do {
            F << 1 + u(rng), u(rng), u(rng), 1 + u(rng);
        } while (F.determinant() < 0.05);
        F *= std::sqrt(jdist(rng) / F.determinant());
        const DeformationState st(F);
        jmin = std::min(jmin, st.J);
        jmax = std::max(jmax, st.J);
        const Matrix2 S = pk2_stress(st, mp);
        const Matrix3 D = tangent_moduli(st, mp);
        Matrix2 S_fd;
        Matrix3 D_fd;
        for (int k = 0; k < 3; ++k) {
            Matrix2 dC = Matrix2::Zero();
            if (k < 2) dC(k, k) = 1.0;
            else dC(0, 1) = dC(1, 0) = 0.5;
            const DeformationState sp = state_from_C(st.C + h * dC), sm = state_from_C(st.C - h * dC);
            const double dpsi = (strain_energy(sp, mp) - strain_energy(sm, mp)) / (2 * h);
            if (k < 2) S_fd(k, k) = 2 * dpsi;
            else S_fd(0, 1) = S_fd(1, 0) = 2 * dpsi;
            const Matrix2 dS = (pk2_stress(sp, mp) - pk2_stress(sm, mp)) / (2 * h);
            D_fd.col(k) = 2.0 * Vector3(dS(0, 0), dS(1, 1), dS(0, 1));
        }
        worst_s = std::max(worst_s, (S_fd - S).norm() / S.norm());
        worst_d = std::max(worst_d, (D_fd - D).norm() / D.norm());
    }
    const DeformationState I(Matrix2::Identity());
    const double s0 = pk2_stress(I, mp).cwiseAbs().maxCoeff();
    const double d0 = (tangent_moduli(I, mp) - plane_stress_hooke(mp.nu)).cwiseAbs().maxCoeff();
    const bool ok = worst_s <= 1e-7 && worst_d <= 1e-6 && s0 == 0.0 && d0 <= 1e-10;
    return {ok, "100 states, J in [" + fmt("%.2f", jmin) + ", " + fmt("%.2f", jmax) + "]; S vs 2 dpsi/dC " +
                    sci(worst_s) + " (<= 1e-7); D vs 2 dS/dC " + sci(worst_d) + " (<= 1e-6); |S(I)| " + sci(s0) +
                    "; |D(I) - Hooke| " + sci(d0) + " (<= 1e-10)"};
}

// ---------------------------------------------------------------------------
// 3. solver contract

struct ContractCheck {
    double residual = 0.0;
    double input = 0.0;
    int states = 0;
};

void check_states(const Evaluator& ev, const Evaluation& e, const DesignVector& d, ContractCheck& c) {
    const Actuation act = ev.actuation(d);
    const ShapeEval in = ev.mesh().shape_values_at(act.point);
    for (size_t lc = 0; lc < e.paths.size(); ++lc) {
        auto visit = [&](const EquilibriumState& st) {
            const GlobalSystem sys = ev.assembler().assemble(st.U, e.fields, ev.bound().counters[lc]);
            c.residual = std::max(c.residual, sys.residual(st.lambda_x, st.lambda_y).norm());
            const Eigen::Vector2d target = st.input_fraction * act.stroke * act.direction();
            c.input = std::max(c.input, (input_displacement(in, st.U) - target).norm() / act.stroke);
            ++c.states;
        };
        for (const auto& st : e.paths[lc].states) visit(st);
        for (const auto& st : e.paths[lc].substeps) visit(st);
    }
}

Outcome solver_contract() {
    ContractCheck c;
    Fixture g = load_fixture("mini_gripper_100");
    g.problem.solver.steps = 4;
    const Evaluator evg(g.problem, g.mesh);
    const Evaluation eg = evg.solve(g.design);
    if (eg.failed) return {false, "mini_gripper_100 path failed: " + eg.failure};
    check_states(evg, eg, g.design, c);

    const Fixture a = load_fixture("toy_arch");
    ProblemSpec nominal = a.problem;
    nominal.solver.max_bisections = 0;
    const Evaluator ev0(nominal, a.mesh);
    const Evaluation e0 = ev0.solve(a.design);
    const Evaluator ev1(a.problem, a.mesh);
    const Evaluation e1 = ev1.solve(a.design);
    if (!e1.failed) check_states(ev1, e1, a.design, c);

    const bool recovered = e0.failed && !e1.failed && e1.paths[0].total_bisections > 0;
    const bool ok = c.residual <= 1e-6 && c.input <= 1e-10 && recovered;
    std::string detail = std::to_string(c.states) + " states; max |R| " + sci(c.residual) +
                         " N (<= 1e-6); max input-point error / |U_in| " + sci(c.input) + " (<= 1e-10); toy_arch ";
    detail += e0.failed ? "fails at the nominal step (" + e0.failure.substr(0, 60) + "...)" : "did not fail nominally";
    detail += e1.failed ? ", bisection failed" : ", completes with " + std::to_string(e1.paths[0].total_bisections) + " bisections";
    return {ok, detail};
}

// ---------------------------------------------------------------------------
// 4. linear limit

Outcome linear_limit() {
    Fixture f = load_fixture("mini_gripper_100");
    Point lo = f.mesh.node(0), hi = lo;
    for (const auto& p : f.mesh.nodes()) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double size = (hi - lo).maxCoeff();
    f.problem.stroke = 1e-6 * size;
    const Evaluator ev(f.problem, f.mesh);
    const Evaluation e = ev.solve(f.design);
    if (e.failed) return {false, e.failure};
    const EquilibriumState lin =
        solve_linear_response(ev.assembler(), e.fields, ev.bound().counters[0], ev.actuation(f.design));
    const EquilibriumState& nl = e.paths[0].states.back();
    const double du = (nl.U - lin.U).norm() / lin.U.norm();
    const double dl = std::hypot(nl.lambda_x - lin.lambda_x, nl.lambda_y - lin.lambda_y) /
                      std::hypot(lin.lambda_x, lin.lambda_y);
    return {du <= 1e-3 && dl <= 1e-3, "|U_in| = " + sci(f.problem.stroke) + " m; rel diff U " + sci(du) +
                                          ", lambda " + sci(dl) + " (<= 1e-3)"};
}

// ---------------------------------------------------------------------------
// 5. projection identities

Outcome projection_identities() {
    double sg0 = 0.0, sgr = 0.0;
    for (double A : {1.0, 2.5e7, 0.37})
        for (double b : {2.0, 3.0, 10.0})
            for (double r : {1e-3, 2.5e-3, 0.04}) {
                sg0 = std::max(sg0, std::abs(super_gaussian(0.0, A, b, r, 4.0) - A) / A);
                sgr = std::max(sgr, std::abs(super_gaussian(r, A, b, r, 4.0) - A / b) / (A / b));
            }

    double load = 0.0, rows = 0.0;
    auto check_mesh = [&](const MeshModel& m, const ProblemSpec& s, const DesignVector& d) {
        const FieldModel fm(m, s.projection, d.load);
        const Eigen::VectorXd f = fm.load_magnitude(d.load);
        double sum = 0.0;
        for (int e = 0; e < m.num_elements(); ++e) sum += f[e] * m.volume(e);
        load = std::max(load, std::abs(sum - 1.0));
        const Eigen::VectorXd w = fm.filter() * Eigen::VectorXd::Ones(m.num_designable());
        rows = std::max(rows, (w.array() - 1.0).abs().maxCoeff());
    };
    const Fixture mini = load_fixture("mini_gripper_100");
    check_mesh(mini.mesh, mini.problem, mini.design);
    const ProblemSpec grip = make_problem(ProblemFamily::gripper);
    const MeshModel gm = build_mesh(grip);
    check_mesh(gm, grip, grip.initial_design(gm));

    const double eps = std::numeric_limits<double>::epsilon();
    const bool ok = sg0 == 0.0 && sgr <= eps && load <= 1e-9 && rows <= 1e-12;
    return {ok, "G(0) = A rel err " + sci(sg0) + ", G(r) = A/b rel err " + sci(sgr) + " (<= machine eps); |sum f V - 1| " +
                    sci(load) + " (<= 1e-9); filter row sums " + sci(rows) + " (<= 1e-12), gripper mesh with " +
                    std::to_string(gm.num_elements()) + " elements"};
}

// ---------------------------------------------------------------------------
// 6. force decomposition identity

Outcome force_identity() {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> lam(-50.0, 50.0), ang(-2 * std::numbers::pi, 2 * std::numbers::pi);
    std::uniform_real_distribution<double> mag(-6.0, 3.0);
    double worst = 0.0;
    for (int t = 0; t < 100000; ++t) {
        const double s = std::pow(10.0, mag(rng));
        const double lx = s * lam(rng), ly = s * lam(rng), th = ang(rng);
        const double a = f_in(lx, ly, th), b = f_p(lx, ly, th);
        const double ref = lx * lx + ly * ly;
        worst = std::max(worst, std::abs(a * a + b * b - ref) / ref);
    }
    return {worst <= 1e-12, "1e5 samples, worst relative error " + sci(worst) + " (<= 1e-12)"};
}

// ---------------------------------------------------------------------------
// 7. fixed versus variable boundary conditions on a coarse gripper

double max_bc_travel(const OptimizationResult& r) {
    const auto& first = r.history.front();
    double travel = 0.0;
    for (const auto& rec : r.history) {
        if (rec.failed) continue;
        for (size_t i = 0; i < rec.supports.size(); ++i)
            travel = std::max(travel, (rec.supports[i] - first.supports[i]).cwiseAbs().maxCoeff());
        travel = std::max(travel, (rec.load - first.load).cwiseAbs().maxCoeff());
    }
    return travel;
}

Outcome fixed_versus_variable() {
    const auto t0 = std::chrono::steady_clock::now();
    RunConfig cfg = load_config(std::string(VARIBC_CONFIG_DIR) + "/gripper_coarse.toml");
    const fs::path dir = work_dir("criterion7");
    const MeshModel mesh = build_mesh(cfg.problem);

    ProblemSpec fixed = cfg.problem, variable = cfg.problem;
    fixed.fixed_bcs = true;
    variable.fixed_bcs = false;
    std::ofstream hf(dir / "history_fixed.csv"), hv(dir / "history_variable.csv");
    const Evaluator ef(fixed, mesh), evv(variable, mesh);
    const OptimizationResult rf = run_optimization(ef, cfg.optimizer, &hf);
    const double tf = seconds_since(t0);
    const OptimizationResult rv = run_optimization(evv, cfg.optimizer, &hv);
    const double elapsed = seconds_since(t0);

    // the variable run is compared through its best feasible iterate, so an
    // infeasible final design cannot carry the comparison
    const double uf = rf.evaluation.objective;
    double uv = -std::numeric_limits<double>::infinity();
    int best_it = -1;
    for (const auto& rec : rv.history)
        if (!rec.failed && rec.feasible && rec.objective > uv) {
            uv = rec.objective;
            best_it = rec.iteration;
        }
    const bool a = rf.reason == StopReason::converged && uf > 0.0 && rf.evaluation.feasible(fixed);
    const bool b = best_it >= 0 && uv >= uf;
    const double travel = max_bc_travel(rv);
    const bool c = travel > 5e-3;
    std::string detail = std::to_string(mesh.num_elements()) + " elements; (a) fixed " + to_string(rf.reason) + " after " +
                         std::to_string(rf.history.size() - 1) + " iterations, U_out = " + fmt("%.3f mm", uf * 1e3) +
                         (rf.evaluation.feasible(fixed) ? ", feasible" : ", infeasible") + "; (b) variable " +
                         to_string(rv.reason) + " after " + std::to_string(rv.history.size() - 1) + " iterations";
    if (best_it >= 0)
        detail += ", best feasible U_out = " + fmt("%.3f mm", uv * 1e3) + " at iteration " + std::to_string(best_it) +
                  " (" + fmt("%+.0f%%", 100.0 * (uv / uf - 1.0)) + ")";
    else
        detail += ", no feasible iterate";
    detail += ", final U_out = " + fmt("%.3f mm", rv.evaluation.objective * 1e3) + " with max violation " +
              sci(rv.evaluation.max_violation(variable)) + "; (c) max BC travel " + fmt("%.2f mm", travel * 1e3) +
              "; " + fmt("%.0f s", tf) + " + " + fmt("%.0f s", elapsed - tf);
    return {a && b && c && elapsed <= 3600.0, detail};
}

// ---------------------------------------------------------------------------
// 8. snap-through design, replayed

Outcome snap_through_replay() {
    const RunConfig cfg = load_config(std::string(VARIBC_CONFIG_DIR) + "/snap_arch.toml");
    const fs::path dir = work_dir("criterion8");
    execute_run(cfg, dir.string(), 1, nullptr);
    const DesignSummary s = read_design_summary((dir / "design.json").string());
    double fin_last = 0.0;
    const int M = cfg.problem.steps();
    {
        const MeshModel mesh = build_mesh(cfg.problem);
        const Evaluator ev(cfg.problem, mesh);
        const Evaluation e = ev.solve(s.design);
        if (e.failed) return {false, "stored design does not solve: " + e.failure};
        fin_last = ev.quantity({QuantityKind::f_in, M, 0, 1.0}, e);
    }
    if (!(fin_last < 0.0))
        return {false, "optimized design has F_in@" + std::to_string(M) + " = " + fmt("%.4g N", fin_last) + " (needs < 0)"};

    const Evaluation replay = replay_design(s, cfg.replay_steps, (dir / "replay").string(), 1);
    if (replay.failed) return {false, "replay failed: " + replay.failure};
    double peak = -1e300, crossing = -1.0, prev = 0.0, prev_w = 0.0, most_negative = 0.0;
    bool seen_positive = false;
    for (const auto& st : replay.paths[0].states) {
        const double fin = f_in(st.lambda_x, st.lambda_y, s.design.theta);
        const double w = st.input_fraction * cfg.problem.stroke;
        peak = std::max(peak, fin);
        if (fin > 0.0) seen_positive = true;
        if (seen_positive && crossing < 0.0 && prev > 0.0 && fin <= 0.0)
            crossing = prev_w + (w - prev_w) * prev / (prev - fin);
        if (crossing >= 0.0) most_negative = std::min(most_negative, fin);
        prev = fin;
        prev_w = w;
    }
    const bool ok = seen_positive && crossing >= 0.0 && most_negative < 0.0;
    return {ok, "optimized F_in@" + std::to_string(M) + " = " + fmt("%.4f N", fin_last) + "; replay with " +
                    std::to_string(cfg.replay_steps) + " steps: peak " + fmt("%.4f N", peak) + ", zero crossing at " +
                    fmt("%.2f mm", crossing * 1e3) + " of " + fmt("%.1f mm", cfg.problem.stroke * 1e3) +
                    ", minimum after crossing " + fmt("%.4f N", most_negative)};
}

// ---------------------------------------------------------------------------
// 9. determinism of the command-line run

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + VARIBC_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

Outcome determinism() {
    const fs::path dir = work_dir("criterion9");
    const std::string arch = std::string(VARIBC_CONFIG_DIR) + "/snap_arch.toml";
    // three load cases exercise the threaded path
    {
        std::ofstream lg(dir / "line.toml");
        lg << "problem = \"line_generator\"\n[mesh]\nelement_size = 0.008\n[projection]\nr_min = 0.016\nr = 0.008\n";
    }
    struct Case {
        std::string name, args;
    };
    const std::vector<Case> cases{
        {"arch", "--threads 1 run \"" + arch + "\" --mode variable --max-iterations 15 --quiet"},
        {"line", "--threads 3 run \"" + (dir / "line.toml").string() + "\" --max-iterations 4 --quiet"}};
    std::string detail;
    bool ok = true;
    for (const auto& c : cases) {
        std::string runs[2];
        for (int k = 0; k < 2; ++k) {
            const fs::path out = dir / (c.name + std::to_string(k));
            const int rc = run_cli(c.args + " --out \"" + out.string() + "\"");
            if (rc != 0) return {false, c.name + ": CLI exited with status " + std::to_string(rc)};
            runs[k] = read_file(out / "history.csv");
        }
        const bool same = !runs[0].empty() && runs[0] == runs[1];
        ok = ok && same;
        const long rows = std::count(runs[0].begin(), runs[0].end(), '\n') - 1;
        detail += (detail.empty() ? "" : "; ") + c.name + ": " + std::to_string(rows) + " rows, " +
                  (same ? "bit-identical" : "DIFFERENT");
    }
    return {ok, detail};
}

// ---------------------------------------------------------------------------
// 10. convergence rule

Outcome convergence_rule() {
    auto rec = [](int it, bool feasible, double drho, bool failed = false) {
        IterationRecord r;
        r.iteration = it;
        r.feasible = feasible;
        r.mean_drho = drho;
        r.failed = failed;
        return r;
    };
    struct Case {
        const char* what;
        IterationRecord last;
        bool expect;
    };
    const std::vector<Case> cases{{"feasible, mean drho 5e-5", rec(5, true, 5e-5), true},
                                  {"infeasible, mean drho 5e-5", rec(5, false, 5e-5), false},
                                  {"feasible, mean drho 2e-4", rec(5, true, 2e-4), false},
                                  {"feasible, mean drho 1e-4", rec(5, true, 1e-4), false},
                                  {"failed solve", rec(5, true, 0.0, true), false},
                                  {"initial iterate", rec(0, true, 0.0), false}};
    int correct = 0;
    std::string wrong;
    for (const auto& c : cases) {
        std::vector<IterationRecord> h{rec(0, false, 0.5), rec(1, true, 0.01)};
        if (c.last.iteration == 0) h.clear();
        h.push_back(c.last);
        if (convergence_check(h, 1e-4) == c.expect) ++correct;
        else wrong += std::string(" [") + c.what + "]";
    }

    // a real run stops exactly at the first record that satisfies the rule
    RunConfig rc = load_config(std::string(VARIBC_CONFIG_DIR) + "/gripper_coarse.toml");
    rc.problem.fixed_bcs = true;
    const MeshModel mesh = build_mesh(rc.problem);
    const Evaluator ev(rc.problem, mesh);
    const OptimizationResult r = run_optimization(ev, rc.optimizer);
    bool consistent = true;
    for (size_t k = 0; k + 1 < r.history.size(); ++k) {
        const auto& h = r.history[k];
        if (h.iteration > 0 && !h.failed && h.feasible && h.mean_drho < rc.optimizer.density_change_tol) consistent = false;
    }
    const auto& last = r.history.back();
    const bool last_ok = r.reason == StopReason::converged
                             ? (last.feasible && !last.failed && last.mean_drho < rc.optimizer.density_change_tol)
                             : !(last.feasible && last.mean_drho < rc.optimizer.density_change_tol);
    const bool ok = correct == static_cast<int>(cases.size()) && consistent && last_ok && r.reason == StopReason::converged;
    return {ok, std::to_string(correct) + "/" + std::to_string(cases.size()) + " synthetic histories decided correctly" +
                    wrong + "; coarse gripper (fixed) stops with " + to_string(r.reason) + " after " +
                    std::to_string(r.history.size() - 1) + " iterations (last mean drho " + sci(last.mean_drho) +
                    (last.feasible ? ", feasible)" : ", infeasible)") +
                    (consistent ? ", no earlier record met the rule" : ", an earlier record met the rule")};
}

struct Criterion {
    int id;
    const char* title;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "adjoint gradients match central differences", gradient_exactness},
        {2, "material stress and tangent consistency", material_consistency},
        {3, "solver contract and bisection recovery", solver_contract},
        {4, "linear limit", linear_limit},
        {5, "projection identities", projection_identities},
        {6, "force decomposition identity", force_identity},
        {7, "fixed vs variable boundary conditions, coarse gripper", fixed_versus_variable},
        {8, "snap-through design replay crosses zero", snap_through_replay},
        {9, "bit-identical history from repeated runs", determinism},
        {10, "convergence rule", convergence_rule},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    bool all_passed = true;
    for (const auto& c : all) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all_passed = all_passed && o.passed;
        std::cout << "criterion " << c.id << ": " << (o.passed ? "PASS" : "FAIL") << "  " << c.title << " | "
                  << o.detail << " [" << fmt("%.1f s", seconds_since(t0)) << "]" << std::endl;
    }
    return all_passed ? 0 : 1;
}
