#pragma once

#include "varibc/assembly.hpp"
#include "varibc/design.hpp"
#include "varibc/design_field.hpp"
#include "varibc/solver.hpp"

#include <Eigen/Core>

#include <utility>
#include <vector>

namespace varibc {

/// Lagrange multipliers of the residual (psi_R) and of the input-point
/// constraint (psi_c).
struct Multipliers {
    Eigen::VectorXd psi_R;
    Eigen::Vector2d psi_c = Eigen::Vector2d::Zero();
};

struct SensitivityRecord {
    Eigen::VectorXd dgdzeta;
    Multipliers multipliers;
};

/// Adjoint machinery of one converged equilibrium state. Construction
/// assembles and factors K_T at the state and precomputes
///   V = K^-1 [F_x F_y],  P = K^-1 N^T,  N V,
/// plus psi^T dR/dzeta for both columns of P, so every quantity read at this
/// state costs at most one extra solve and one element sweep.
class StateAdjoint {
public:
    StateAdjoint(const Assembler& assembler, const FieldState& fields, const FieldJacobians& jacobians,
                 const DesignVector& design, const Actuation& actuation, const Eigen::VectorXd& counter,
                 const EquilibriumState& state);

    /// Solves
    ///   df/dU - psi_R^T K + psi_c^T N = 0,   df/dlambda + psi_R^T [F_x F_y] = 0.
    /// Throws SingularReducedSystem when N V is singular.
    Multipliers solve_multipliers(const Eigen::VectorXd& dfdU, const Eigen::Vector2d& dfdlambda) const;
    Multipliers solve_multipliers(const std::vector<std::pair<int, double>>& dfdU,
                                  const Eigen::Vector2d& dfdlambda) const;

    /// psi_R^T dR/dzeta + psi_c^T dc/dzeta (the explicit df/dzeta is not included).
    Eigen::VectorXd implicit_gradient(const Multipliers& m) const;

    /// Relative residual of the two multiplier equations.
    double multiplier_residual(const Multipliers& m, const Eigen::VectorXd& dfdU,
                               const Eigen::Vector2d& dfdlambda) const;

    /// dc/dzeta (2 x |zeta|): only the X_f, Y_f and theta columns are nonzero.
    Eigen::MatrixXd constraint_partials() const;

    const GlobalSystem& system() const { return system_; }
    const ShapeEval& input() const { return input_; }

private:
    Eigen::VectorXd n_transpose(const Eigen::Vector2d& v) const;

    const Assembler* assembler_;
    const FieldState* fields_;
    const FieldJacobians* jac_;
    DesignLayout layout_;
    Actuation actuation_;
    EquilibriumState state_;
    ShapeEval input_;
    GlobalSystem system_;
    TangentSolver solver_;
    Eigen::MatrixXd V_;  // n x 2
    Eigen::MatrixXd P_;  // n x 2
    Eigen::Matrix2d NV_;
    Eigen::MatrixXd GP_;  // |zeta| x 2: psi^T dR/dzeta for the columns of P
    Eigen::Vector2d dc_dxf_, dc_dyf_, dc_dtheta_;
};

/// Full derivative of a quantity whose only state dependence is on one
/// state: df/dzeta_explicit + psi_R^T dR/dzeta + psi_c^T dc/dzeta.
SensitivityRecord total_derivative(const StateAdjoint& adjoint, const Eigen::VectorXd& dfdU,
                                   const Eigen::Vector2d& dfdlambda, const Eigen::VectorXd& dfdzeta);

}  // namespace varibc
