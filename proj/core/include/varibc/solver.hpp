#pragma once

#include "varibc/assembly.hpp"
#include "varibc/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCholesky>

#include <iosfwd>
#include <memory>
#include <vector>

namespace varibc {

/// Sparse LDL^T factorization of a tangent matrix whose sparsity pattern
/// does not change between calls.
class TangentSolver {
public:
    /// Throws SingularTangent when a pivot is zero or not finite.
    void factorize(const SparseMatrix& K);
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    Eigen::MatrixXd solve(const Eigen::MatrixXd& B) const;
    bool ready() const { return factorized_; }

private:
    Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
    Eigen::Index analyzed_size_ = -1;
    Eigen::Index analyzed_nnz_ = -1;
    bool factorized_ = false;
};

struct SolverConfig {
    double tol_residual = 1e-6;   // N
    int max_corrector_iters = 20;
    int max_bisections = 6;
    int steps = 4;                // M
    std::ostream* trace = nullptr;  // optional CSV trace of every converged (sub)step

    void validate() const;
};

/// Prescribed input motion: the point (fixed during a solve), its direction
/// and the full stroke length |U_in|.
struct Actuation {
    Point point = Point::Zero();
    double theta = 0.0;   // rad
    double stroke = 0.0;  // m

    Eigen::Vector2d direction() const;
};

struct EquilibriumState {
    Eigen::VectorXd U;
    double lambda_x = 0.0;
    double lambda_y = 0.0;
    double input_fraction = 0.0;
    double residual_norm = 0.0;
    int corrector_iterations = 0;
    int bisections = 0;     // halvings used to reach this state
    bool substep = false;   // true for bisection intermediate states
};

struct EquilibriumPath {
    std::vector<EquilibriumState> states;     // the M requested fractions m/M
    std::vector<EquilibriumState> substeps;   // bisection intermediates
    std::vector<double> step_seconds;         // wall time per requested step
    int total_iterations = 0;
    int total_bisections = 0;
};

/// Displacement components of two increment vectors at the input point:
/// column k holds (ux, uy) of the k-th vector.
Eigen::Matrix2d input_point_response(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                     const ShapeEval& input);

/// Variable-input displacement control. The actuator point moves the
/// structure along (cos theta, sin theta) while the two load intensities
/// (lambda_x, lambda_y) are unknowns solved together with U.
class EquilibriumSolver {
public:
    EquilibriumSolver(const Assembler& assembler, const FieldState& fields,
                      Eigen::VectorXd counter, Actuation actuation, SolverConfig config);

    const ShapeEval& input() const { return input_; }
    const Actuation& actuation() const { return actuation_; }
    const SolverConfig& config() const { return config_; }

    /// Unloaded, undeformed state.
    EquilibriumState initial_state() const;

    /// Linearized step of size d_fraction * stroke from a state whose tangent
    /// is current. The input-point motion of the increment is exact.
    EquilibriumState predictor(const EquilibriumState& state, double d_fraction);
    /// Newton iterations at fixed input fraction. Throws MaxIterationsExceeded,
    /// SingularTangent, Singular2x2 or NonPositiveJacobian.
    EquilibriumState corrector(const EquilibriumState& predicted);
    /// One predictor-corrector step from a converged state.
    EquilibriumState step(const EquilibriumState& from, double d_fraction);

    /// Full path to fractions 1/M .. 1 with step bisection. Throws PathFailed.
    EquilibriumPath solve_path();

    /// System assembled at the most recent state seen by the solver.
    const GlobalSystem& system() const { return system_; }

private:
    void refresh(const Eigen::VectorXd& U);

    const Assembler* assembler_;
    const FieldState* fields_;
    Eigen::VectorXd counter_;
    Actuation actuation_;
    SolverConfig config_;
    ShapeEval input_;
    GlobalSystem system_;
    TangentSolver tangent_;
    Eigen::VectorXd assembled_at_;
    bool have_system_ = false;
};

inline EquilibriumPath solve_equilibrium_path(const Assembler& assembler, const FieldState& fields,
                                              const Eigen::VectorXd& counter, const Actuation& actuation,
                                              const SolverConfig& config) {
    return EquilibriumSolver(assembler, fields, counter, actuation, config).solve_path();
}

/// One-shot small-strain solution of the same constrained problem at the
/// full stroke (K_lin U = lambda_x F_x + lambda_y F_y + F_counter, N U = U_in).
EquilibriumState solve_linear_response(const Assembler& assembler, const FieldState& fields,
                                       const Eigen::VectorXd& counter, const Actuation& actuation);

/// Interpolation row pair N(X_f, Y_f) applied to U.
Eigen::Vector2d input_displacement(const ShapeEval& input, const Eigen::VectorXd& U);

}  // namespace varibc
