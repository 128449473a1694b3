#include "varibc/solver.hpp"

#include "varibc/errors.hpp"

#include <Eigen/LU>

#include <chrono>
#include <cmath>
#include <ostream>

namespace varibc {

void TangentSolver::factorize(const SparseMatrix& K) {
    factorized_ = false;
    if (K.rows() != analyzed_size_ || K.nonZeros() != analyzed_nnz_) {
        ldlt_.analyzePattern(K);
        analyzed_size_ = K.rows();
        analyzed_nnz_ = K.nonZeros();
    }
    ldlt_.factorize(K);
    if (ldlt_.info() != Eigen::Success) throw SingularTangent("tangent factorization failed");
    const Eigen::VectorXd d = ldlt_.vectorD();
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (!std::isfinite(d[i]) || d[i] == 0.0) throw SingularTangent("zero pivot in tangent factorization");
    factorized_ = true;
}

Eigen::VectorXd TangentSolver::solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = ldlt_.solve(b);
    if (!x.allFinite()) throw SingularTangent("non-finite tangent solution");
    return x;
}

Eigen::MatrixXd TangentSolver::solve(const Eigen::MatrixXd& B) const {
    Eigen::MatrixXd X = ldlt_.solve(B);
    if (!X.allFinite()) throw SingularTangent("non-finite tangent solution");
    return X;
}

void SolverConfig::validate() const {
    if (!(tol_residual > 0.0)) throw ConfigValidationError("solver.tol_residual", "must be positive");
    if (max_corrector_iters < 1) throw ConfigValidationError("solver.max_corrector_iters", "must be at least 1");
    if (max_bisections < 0) throw ConfigValidationError("solver.max_bisections", "must be non-negative");
    if (steps < 1) throw ConfigValidationError("steps", "must be at least 1");
}

Eigen::Vector2d Actuation::direction() const { return {std::cos(theta), std::sin(theta)}; }

Eigen::Vector2d input_displacement(const ShapeEval& input, const Eigen::VectorXd& U) {
    return input.interpolate(U);
}

Eigen::Matrix2d input_point_response(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                     const ShapeEval& input) {
    Eigen::Matrix2d A;
    A.col(0) = input.interpolate(a);
    A.col(1) = input.interpolate(b);
    return A;
}

namespace {

Eigen::Vector2d solve_2x2(const Eigen::Matrix2d& A, const Eigen::Vector2d& rhs) {
    const double det = A.determinant();
    const double scale = A.squaredNorm();
    if (!(std::abs(det) > 1e-13 * scale)) throw Singular2x2("input-point response matrix is singular");
    return A.inverse() * rhs;
}

// Step failures that a shorter step may avoid.
bool recoverable(const Error& e) {
    return dynamic_cast<const MaxIterationsExceeded*>(&e) || dynamic_cast<const SingularTangent*>(&e) ||
           dynamic_cast<const Singular2x2*>(&e) || dynamic_cast<const NonPositiveJacobian*>(&e);
}

}  // namespace

EquilibriumSolver::EquilibriumSolver(const Assembler& assembler, const FieldState& fields,
                                     Eigen::VectorXd counter, Actuation actuation, SolverConfig config)
    : assembler_(&assembler),
      fields_(&fields),
      counter_(std::move(counter)),
      actuation_(actuation),
      config_(config),
      input_(assembler.mesh().shape_values_at(actuation.point)) {
    config_.validate();
    if (!(actuation_.stroke > 0.0)) throw ConfigValidationError("input_displacement", "must be positive");
    if (counter_.size() == 0) counter_ = Eigen::VectorXd::Zero(assembler.num_dofs());
}

EquilibriumState EquilibriumSolver::initial_state() const {
    EquilibriumState s;
    s.U = Eigen::VectorXd::Zero(assembler_->num_dofs());
    return s;
}

void EquilibriumSolver::refresh(const Eigen::VectorXd& U) {
    if (have_system_ && assembled_at_.size() == U.size() && assembled_at_ == U) return;
    have_system_ = false;
    if (system_.F_ext_x.size() == 0) {
        system_ = assembler_->assemble(U, *fields_, counter_);
    } else {
        assembler_->update(U, *fields_, system_);
    }
    assembled_at_ = U;
    have_system_ = true;
}

EquilibriumState EquilibriumSolver::predictor(const EquilibriumState& state, double d_fraction) {
    EquilibriumState s = state;
    s.input_fraction = state.input_fraction + d_fraction;
    if (d_fraction == 0.0) return s;
    refresh(state.U);
    tangent_.factorize(system_.K_T);
    Eigen::MatrixXd F(system_.F_ext_x.size(), 2);
    F.col(0) = system_.F_ext_x;
    F.col(1) = system_.F_ext_y;
    const Eigen::MatrixXd V = tangent_.solve(F);
    const Eigen::Matrix2d A = input_point_response(V.col(0), V.col(1), input_);
    const Eigen::Vector2d target = s.input_fraction * actuation_.stroke * actuation_.direction();
    const Eigen::Vector2d dl = solve_2x2(A, target - input_displacement(input_, state.U));
    s.U = state.U + dl.x() * V.col(0) + dl.y() * V.col(1);
    s.lambda_x += dl.x();
    s.lambda_y += dl.y();
    s.corrector_iterations = 0;
    return s;
}

EquilibriumState EquilibriumSolver::corrector(const EquilibriumState& predicted) {
    EquilibriumState s = predicted;
    const Eigen::Vector2d target = s.input_fraction * actuation_.stroke * actuation_.direction();
    const double c_tol = 1e-11 * actuation_.stroke;
    double first = -1.0;
    for (int j = 0;; ++j) {
        refresh(s.U);
        const Eigen::VectorXd R = system_.residual(s.lambda_x, s.lambda_y);
        const double rn = R.norm();
        const Eigen::Vector2d c = input_displacement(input_, s.U) - target;
        if (!std::isfinite(rn)) throw MaxIterationsExceeded(j, rn);
        if (first < 0.0) first = rn;
        if (rn <= config_.tol_residual && c.cwiseAbs().maxCoeff() <= c_tol) {
            s.residual_norm = rn;
            s.corrector_iterations = j;
            return s;
        }
        if (j >= config_.max_corrector_iters || rn > 1e8 * std::max(first, config_.tol_residual))
            throw MaxIterationsExceeded(j, rn);

        tangent_.factorize(system_.K_T);
        Eigen::MatrixXd B(R.size(), 3);
        B.col(0) = system_.F_ext_x;
        B.col(1) = system_.F_ext_y;
        B.col(2) = R;
        const Eigen::MatrixXd V = tangent_.solve(B);
        const Eigen::Matrix2d A = input_point_response(V.col(0), V.col(1), input_);
        const Eigen::Vector2d dl = solve_2x2(A, -input_displacement(input_, V.col(2)) - c);
        s.U += dl.x() * V.col(0) + dl.y() * V.col(1) + V.col(2);
        s.lambda_x += dl.x();
        s.lambda_y += dl.y();
    }
}

EquilibriumState EquilibriumSolver::step(const EquilibriumState& from, double d_fraction) {
    return corrector(predictor(from, d_fraction));
}

EquilibriumPath EquilibriumSolver::solve_path() {
    using clock = std::chrono::steady_clock;
    EquilibriumPath path;
    EquilibriumState state = initial_state();
    const int M = config_.steps;
    if (config_.trace)
        *config_.trace << "step,fraction,bisections,iterations,residual_norm,lambda_x,lambda_y\n";

    for (int m = 1; m <= M; ++m) {
        const auto t0 = clock::now();
        const double target = static_cast<double>(m) / M;
        int level = 0;
        int used = 0;
        while (state.input_fraction < target) {
            const double h = (1.0 / M) / std::ldexp(1.0, level);
            double next = state.input_fraction + h;
            if (next > target || target - next < 1e-12) next = target;
            try {
                EquilibriumState pred = predictor(state, next - state.input_fraction);
                pred.input_fraction = next;
                EquilibriumState trial = corrector(pred);
                trial.bisections = used;
                state = std::move(trial);
                path.total_iterations += state.corrector_iterations;
                if (next < target) {
                    state.substep = true;
                    path.substeps.push_back(state);
                }
                if (config_.trace)
                    *config_.trace << m << ',' << next << ',' << used << ',' << state.corrector_iterations
                                   << ',' << state.residual_norm << ',' << state.lambda_x << ','
                                   << state.lambda_y << '\n';
            } catch (const Error& e) {
                if (!recoverable(e)) throw;
                if (++level > config_.max_bisections) throw PathFailed(state.input_fraction, e.what());
                ++used;
                ++path.total_bisections;
            }
        }
        state.substep = false;
        state.input_fraction = target;
        path.states.push_back(state);
        path.step_seconds.push_back(std::chrono::duration<double>(clock::now() - t0).count());
    }
    return path;
}

EquilibriumState solve_linear_response(const Assembler& assembler, const FieldState& fields,
                                       const Eigen::VectorXd& counter, const Actuation& actuation) {
    const ShapeEval input = assembler.mesh().shape_values_at(actuation.point);
    const SparseMatrix K = assembler.linear_stiffness(fields);
    const auto [fx, fy] = assemble_external_refs(fields.load, assembler.mesh());
    TangentSolver solver;
    solver.factorize(K);
    Eigen::MatrixXd B(fx.size(), 3);
    B.col(0) = fx;
    B.col(1) = fy;
    B.col(2) = counter.size() == 0 ? Eigen::VectorXd::Zero(fx.size()) : counter;
    const Eigen::MatrixXd V = solver.solve(B);
    const Eigen::Matrix2d A = input_point_response(V.col(0), V.col(1), input);
    const Eigen::Vector2d l =
        solve_2x2(A, actuation.stroke * actuation.direction() - input_displacement(input, V.col(2)));
    EquilibriumState s;
    s.U = l.x() * V.col(0) + l.y() * V.col(1) + V.col(2);
    s.lambda_x = l.x();
    s.lambda_y = l.y();
    s.input_fraction = 1.0;
    return s;
}

}  // namespace varibc
