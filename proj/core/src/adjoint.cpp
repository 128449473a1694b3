#include "varibc/adjoint.hpp"

#include "varibc/errors.hpp"

#include <Eigen/LU>

#include <cmath>

namespace varibc {

StateAdjoint::StateAdjoint(const Assembler& assembler, const FieldState& fields,
                           const FieldJacobians& jacobians, const DesignVector& design,
                           const Actuation& actuation, const Eigen::VectorXd& counter,
                           const EquilibriumState& state)
    : assembler_(&assembler),
      fields_(&fields),
      jac_(&jacobians),
      layout_(design.layout()),
      actuation_(actuation),
      state_(state),
      input_(assembler.mesh().shape_values_at(actuation.point)) {
    system_ = assembler.assemble(state.U, fields, counter);
    solver_.factorize(system_.K_T);

    const Eigen::Index n = system_.F_ext_x.size();
    Eigen::MatrixXd rhs(n, 4);
    rhs.col(0) = system_.F_ext_x;
    rhs.col(1) = system_.F_ext_y;
    rhs.col(2) = n_transpose({1.0, 0.0});
    rhs.col(3) = n_transpose({0.0, 1.0});
    const Eigen::MatrixXd X = solver_.solve(rhs);
    V_ = X.leftCols(2);
    P_ = X.rightCols(2);
    NV_ = input_point_response(V_.col(0), V_.col(1), input_);

    GP_.resize(layout_.size(), 2);
    for (int k = 0; k < 2; ++k)
        GP_.col(k) = assembler.residual_design_vjp(P_.col(k), state.U, state.lambda_x, state.lambda_y,
                                                   fields, jacobians);

    dc_dxf_ = input_.gradient_x(state.U);
    dc_dyf_ = input_.gradient_y(state.U);
    const double s = state.input_fraction * actuation.stroke;
    dc_dtheta_ = Eigen::Vector2d(s * std::sin(actuation.theta), -s * std::cos(actuation.theta));
}

Eigen::VectorXd StateAdjoint::n_transpose(const Eigen::Vector2d& v) const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(assembler_->num_dofs());
    for (int a = 0; a < 3; ++a) {
        r[2 * input_.nodes[a]] += input_.values[a] * v.x();
        r[2 * input_.nodes[a] + 1] += input_.values[a] * v.y();
    }
    return r;
}

Multipliers StateAdjoint::solve_multipliers(const Eigen::VectorXd& dfdU, const Eigen::Vector2d& dfdlambda) const {
    const double det = NV_.determinant();
    if (!(std::abs(det) > 1e-13 * NV_.squaredNorm()))
        throw SingularReducedSystem("input-point response of the reference loads is singular");
    Multipliers m;
    Eigen::Vector2d rhs = dfdlambda;
    Eigen::VectorXd a;
    const bool state_dependent = dfdU.size() > 0 && dfdU.squaredNorm() > 0.0;
    if (state_dependent) {
        a = solver_.solve(dfdU);
        rhs += Eigen::Vector2d(system_.F_ext_x.dot(a), system_.F_ext_y.dot(a));
    }
    m.psi_c = -NV_.transpose().inverse() * rhs;
    m.psi_R = P_ * m.psi_c;
    if (state_dependent) m.psi_R += a;
    return m;
}

Multipliers StateAdjoint::solve_multipliers(const std::vector<std::pair<int, double>>& dfdU,
                                            const Eigen::Vector2d& dfdlambda) const {
    Eigen::VectorXd g;
    if (!dfdU.empty()) {
        g = Eigen::VectorXd::Zero(assembler_->num_dofs());
        for (const auto& [dof, v] : dfdU) g[dof] += v;
    }
    return solve_multipliers(g, dfdlambda);
}

Eigen::VectorXd StateAdjoint::implicit_gradient(const Multipliers& m) const {
    // psi_R = a + P psi_c, so its residual VJP splits into the stored P part
    // and one sweep for a (skipped when f does not depend on U)
    const Eigen::VectorXd a = m.psi_R - P_ * m.psi_c;
    Eigen::VectorXd g = GP_ * m.psi_c;
    if (a.lpNorm<Eigen::Infinity>() > 0.0)
        g += assembler_->residual_design_vjp(a, state_.U, state_.lambda_x, state_.lambda_y, *fields_, *jac_);
    g[layout_.xf()] += m.psi_c.dot(dc_dxf_);
    g[layout_.yf()] += m.psi_c.dot(dc_dyf_);
    g[layout_.theta()] += m.psi_c.dot(dc_dtheta_);
    return g;
}

double StateAdjoint::multiplier_residual(const Multipliers& m, const Eigen::VectorXd& dfdU,
                                         const Eigen::Vector2d& dfdlambda) const {
    Eigen::VectorXd r1 = -(system_.K_T * m.psi_R) + n_transpose(m.psi_c);
    double scale1 = (system_.K_T * m.psi_R).norm();
    if (dfdU.size() > 0) {
        r1 += dfdU;
        scale1 = std::max(scale1, dfdU.norm());
    }
    const Eigen::Vector2d r2 =
        dfdlambda + Eigen::Vector2d(system_.F_ext_x.dot(m.psi_R), system_.F_ext_y.dot(m.psi_R));
    const double scale2 = std::max(dfdlambda.norm(), 1e-300);
    const double e1 = scale1 > 0.0 ? r1.norm() / scale1 : r1.norm();
    const double e2 = dfdlambda.norm() > 0.0 ? r2.norm() / scale2 : r2.norm();
    return std::max(e1, e2);
}

Eigen::MatrixXd StateAdjoint::constraint_partials() const {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, layout_.size());
    d.col(layout_.xf()) = dc_dxf_;
    d.col(layout_.yf()) = dc_dyf_;
    d.col(layout_.theta()) = dc_dtheta_;
    return d;
}

SensitivityRecord total_derivative(const StateAdjoint& adjoint, const Eigen::VectorXd& dfdU,
                                   const Eigen::Vector2d& dfdlambda, const Eigen::VectorXd& dfdzeta) {
    SensitivityRecord r;
    r.multipliers = adjoint.solve_multipliers(dfdU, dfdlambda);
    r.dgdzeta = adjoint.implicit_gradient(r.multipliers);
    if (dfdzeta.size() > 0) r.dgdzeta += dfdzeta;
    return r;
}

}  // namespace varibc
