#include "varibc/verify.hpp"

#include "varibc/design_field.hpp"
#include "varibc/errors.hpp"
#include "varibc/evaluation.hpp"
#include "varibc/fixtures.hpp"
#include "varibc/material.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

namespace varibc {

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

CheckResult check(const std::string& suite, const std::string& name, double err, double tol) {
    return {suite, name, err <= tol, "error " + sci(err) + " (tolerance " + sci(tol) + ")"};
}

Matrix2 random_deformation(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-0.4, 0.4), j(0.5, 2.0);
    Matrix2 F;
    while (true) {
        F << 1.0 + u(rng), u(rng), u(rng), 1.0 + u(rng);
        const double det = F.determinant();
        if (det <= 0.05) continue;
        // uniform scaling puts J at the sampled value
        F *= std::sqrt(j(rng) / det);
        return F;
    }
}

void material_checks(std::vector<CheckResult>& out) {
    const MaterialParams mp = MaterialParams::from_poisson(0.49);
    std::mt19937 rng(7);
    double worst_s = 0.0, worst_d = 0.0;
    for (int t = 0; t < 50; ++t) {
        const Matrix2 F = random_deformation(rng);
        const DeformationState st(F);
        const Matrix2 S = pk2_stress(st, mp);
        const Matrix3 D = tangent_moduli(st, mp);
        // S = 2 dpsi/dC, D = 2 dS/dC by central differences in C
        const double h = 1e-6;
        for (int k = 0; k < 3; ++k) {
            Matrix2 dC = Matrix2::Zero();
            if (k < 2) dC(k, k) = 1.0;
            else dC(0, 1) = dC(1, 0) = 0.5;
            auto state_at = [&](double s) {
                const Matrix2 C = st.C + s * dC;
                const Eigen::SelfAdjointEigenSolver<Matrix2> es(C);
                const Matrix2 U = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                                  es.eigenvectors().transpose();
                return DeformationState(U);
            };
            const DeformationState sp = state_at(h), sm = state_at(-h);
            const double dpsi = (strain_energy(sp, mp) - strain_energy(sm, mp)) / (2 * h);
            const double expect_psi = 0.5 * (S.cwiseProduct(dC)).sum();
            worst_s = std::max(worst_s, std::abs(dpsi - expect_psi) / std::max(S.norm(), 1e-12));
            const Matrix2 dS = (pk2_stress(sp, mp) - pk2_stress(sm, mp)) / (2 * h);
            const Vector3 dE(0.5 * dC(0, 0), 0.5 * dC(1, 1), dC(0, 1));
            const Vector3 lin = D * dE;
            const Vector3 fd(dS(0, 0), dS(1, 1), dS(0, 1));
            worst_d = std::max(worst_d, (fd - lin).norm() / D.norm());
        }
    }
    out.push_back(check("material", "S = 2 dpsi/dC (50 states)", worst_s, 1e-7));
    out.push_back(check("material", "D = 2 dS/dC (50 states)", worst_d, 1e-6));
    const DeformationState I(Matrix2::Identity());
    out.push_back(check("material", "S(I) = 0", pk2_stress(I, mp).norm(), 0.0));
    out.push_back(check("material", "D(I) = plane-stress Hooke",
                        (tangent_moduli(I, mp) - plane_stress_hooke(0.49)).norm() / plane_stress_hooke(0.49).norm(),
                        1e-10));
}

void projection_checks(std::vector<CheckResult>& out, const Fixture& mini) {
    const ProjectionParams& p = mini.problem.projection;
    out.push_back(check("projection", "super-Gaussian at 0 equals A",
                        std::abs(super_gaussian(0.0, 2.5, p.b, p.r, p.P) - 2.5), 0.0));
    out.push_back(check("projection", "super-Gaussian at r equals A/b",
                        std::abs(super_gaussian(p.r, 2.5, p.b, p.r, p.P) - 2.5 / p.b) / 2.5, 1e-15));
    const FieldModel model(mini.mesh, p, mini.design.load);
    const FieldState fs = model.evaluate(mini.design);
    double sum = 0.0;
    for (int e = 0; e < mini.mesh.num_elements(); ++e) sum += fs.load[e] * mini.mesh.volume(e);
    out.push_back(check("projection", "load normalization at the initial design", std::abs(sum - 1.0), 1e-9));
    const SparseRowMatrix& W = model.filter();
    double worst = 0.0;
    for (int i = 0; i < W.rows(); ++i) worst = std::max(worst, std::abs(W.row(i).sum() - 1.0));
    out.push_back(check("projection", "filter rows sum to one", worst, 1e-12));
}

void force_checks(std::vector<CheckResult>& out) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-100.0, 100.0), a(-10.0, 10.0);
    double worst = 0.0;
    for (int t = 0; t < 100000; ++t) {
        const double lx = u(rng), ly = u(rng), th = a(rng);
        const double fi = f_in(lx, ly, th), fp = f_p(lx, ly, th);
        const double ref = lx * lx + ly * ly;
        if (ref > 0.0) worst = std::max(worst, std::abs(fi * fi + fp * fp - ref) / ref);
    }
    out.push_back(check("forces", "F_in^2 + F_p^2 = |lambda|^2 (1e5 samples)", worst, 1e-12));
}

void triangle_checks(std::vector<CheckResult>& out) {
    const Fixture f = load_fixture("one_triangle_spring");
    const Evaluator ev(f.problem, f.mesh);
    const Evaluation e = ev.solve(f.design);
    if (e.failed) {
        out.push_back({"fixtures", "one_triangle_spring", false, e.failure});
        return;
    }
    const double k = f.expect("force_per_displacement").value;
    double worst = 0.0;
    for (const auto& s : e.paths[0].states) {
        const double u = s.input_fraction * f.problem.stroke;
        worst = std::max(worst, std::abs(f_in(s.lambda_x, s.lambda_y, f.problem.theta) - k * u) / (k * u));
        worst = std::max(worst, std::abs(f_p(s.lambda_x, s.lambda_y, f.problem.theta)) / (k * u));
    }
    out.push_back(check("fixtures", "one_triangle_spring force = k_e u", worst, 1e-9));
}

void arch_checks(std::vector<CheckResult>& out) {
    const Fixture f = load_fixture("toy_arch");
    ProblemSpec nominal = f.problem;
    nominal.solver.max_bisections = 0;
    const Evaluator ev0(nominal, f.mesh);
    const Evaluation e0 = ev0.solve(f.design);
    const Evaluator ev(f.problem, f.mesh);
    const Evaluation e = ev.solve(f.design);
    const bool recovered = e0.failed && !e.failed && e.paths[0].total_bisections > 0;
    out.push_back({"solver", "toy_arch: nominal step fails, bisection completes the path", recovered,
                   std::string("without bisection: ") + (e0.failed ? "failed" : "completed") +
                       "; with bisection: " + (e.failed ? "failed" : "completed")});

    // fine path: zero crossing of the apex force near the rise
    const Evaluation fine = ev.solve(f.design, 40);
    if (fine.failed) {
        out.push_back({"solver", "toy_arch zero crossing", false, fine.failure});
        return;
    }
    double prev_w = 0.0, prev_f = 0.0, crossing = -1.0;
    for (const auto& s : fine.paths[0].states) {
        const double w = s.input_fraction * f.problem.stroke;
        const double fin = f_in(s.lambda_x, s.lambda_y, f.problem.theta);
        if (crossing < 0.0 && prev_f > 0.0 && fin <= 0.0) crossing = prev_w + (w - prev_w) * prev_f / (prev_f - fin);
        prev_w = w;
        prev_f = fin;
    }
    const ExpectedValue& z = f.expect("zero_crossing");
    const double err = crossing < 0.0 ? 1.0 : std::abs(crossing - z.value) / z.value;
    out.push_back(check("solver", "toy_arch force changes sign at the truss crossing point", err, z.tolerance));
}

void solver_checks(std::vector<CheckResult>& out, const Fixture& mini) {
    const Evaluator ev(mini.problem, mini.mesh);
    const Evaluation e = ev.solve(mini.design);
    if (e.failed) {
        out.push_back({"solver", "mini_gripper_100 path", false, e.failure});
        return;
    }
    const Actuation act = ev.actuation(mini.design);
    const ShapeEval in = mini.mesh.shape_values_at(act.point);
    double worst_r = 0.0, worst_u = 0.0;
    for (const auto& s : e.paths[0].states) {
        GlobalSystem sys = ev.assembler().assemble(s.U, e.fields, ev.bound().counters[0]);
        worst_r = std::max(worst_r, sys.residual(s.lambda_x, s.lambda_y).norm());
        const Eigen::Vector2d target = s.input_fraction * act.stroke * act.direction();
        worst_u = std::max(worst_u, (input_displacement(in, s.U) - target).norm() / act.stroke);
    }
    out.push_back(check("solver", "equilibrium residual [N]", worst_r, mini.problem.solver.tol_residual));
    out.push_back(check("solver", "input-point displacement / stroke", worst_u, 1e-10));
}

void gradient_checks(std::vector<CheckResult>& out, const Fixture& mini) {
    const Evaluator ev(mini.problem, mini.mesh);
    const Evaluation e = ev.solve(mini.design);
    if (e.failed) {
        out.push_back({"gradients", "mini_gripper_100 path", false, e.failure});
        return;
    }
    const std::vector<QuantityRef> qs{{QuantityKind::u_out, 2, 0, 1.0},
                                      {QuantityKind::f_in, 2, 0, 1.0},
                                      {QuantityKind::f_p, 1, 0, 1.0},
                                      {QuantityKind::volume_fraction, 0, 0, 1.0},
                                      {QuantityKind::path_error, 0, 0, 1.0}};
    const auto grads = ev.gradients(qs, e);
    const DesignLayout L = mini.design.layout();
    const Eigen::VectorXd z0 = mini.design.flatten();
    struct Probe {
        int index;
        double step;
        double tol;
        const char* what;
    };
    const std::vector<Probe> probes{{3, 1e-6, 1e-4, "density"},     {41, 1e-6, 1e-4, "density"},
                                    {L.theta(), 1e-6, 1e-4, "theta"}, {L.xs(0), 1e-7, 1e-3, "support"},
                                    {L.yf(), 1e-7, 1e-3, "load"}};
    for (size_t qi = 0; qi < qs.size(); ++qi) {
        double worst = 0.0;
        bool ok = true;
        for (const auto& p : probes) {
            Eigen::VectorXd zp = z0, zm = z0;
            zp[p.index] += p.step;
            zm[p.index] -= p.step;
            const Evaluation ep = ev.solve(DesignVector::unflatten(zp, L));
            const Evaluation em = ev.solve(DesignVector::unflatten(zm, L));
            if (ep.failed || em.failed) {
                ok = false;
                continue;
            }
            const double fd = (ev.quantity(qs[qi], ep) - ev.quantity(qs[qi], em)) / (2 * p.step);
            // entries far below the gradient's scale are compared against that scale
            const double scale = std::max(std::abs(fd), 1e-3 * grads[qi].lpNorm<Eigen::Infinity>());
            const double err = scale > 0.0 ? std::abs(grads[qi][p.index] - fd) / scale : 0.0;
            worst = std::max(worst, err / p.tol);
        }
        out.push_back({"gradients", qs[qi].label() + " adjoint vs central differences", ok && worst <= 1.0,
                       "worst error / tolerance " + sci(worst)});
    }
}

}  // namespace

std::vector<CheckResult> run_verification() {
    std::vector<CheckResult> out;
    const Fixture mini = load_fixture("mini_gripper_100");
    auto guarded = [&](const std::string& suite, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            out.push_back({suite, "unexpected exception", false, e.what()});
        }
    };
    guarded("material", [&] { material_checks(out); });
    guarded("projection", [&] { projection_checks(out, mini); });
    guarded("forces", [&] { force_checks(out); });
    guarded("fixtures", [&] { triangle_checks(out); });
    guarded("solver", [&] { solver_checks(out, mini); });
    guarded("solver", [&] { arch_checks(out); });
    guarded("gradients", [&] { gradient_checks(out, mini); });
    return out;
}

bool print_verification(std::ostream& os, const std::vector<CheckResult>& results) {
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        char line[256];
        std::snprintf(line, sizeof line, "%-4s  %-10s  %-62s  %s", r.passed ? "PASS" : "FAIL", r.suite.c_str(),
                      r.name.c_str(), r.detail.c_str());
        os << line << '\n';
    }
    os << (all ? "all checks passed" : "some checks FAILED") << '\n';
    return all;
}

}  // namespace varibc
