#pragma once

#include "varibc/adjoint.hpp"
#include "varibc/assembly.hpp"
#include "varibc/design_field.hpp"
#include "varibc/problems.hpp"
#include "varibc/solver.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace varibc {

/// Everything computed for one design: fields, equilibrium paths per load
/// case, objective and constraint values and (optionally) their gradients.
struct Evaluation {
    DesignVector design;
    FieldState fields;
    std::vector<EquilibriumPath> paths;  // one per load case

    bool failed = false;          // a path could not be completed
    std::string failure;
    double fraction_reached = 1.0;

    double objective = 0.0;                 // raw quantity value
    std::vector<double> constraints;        // raw quantity values, spec order
    Eigen::VectorXd objective_gradient;     // d(raw objective)/dzeta
    std::vector<Eigen::VectorXd> constraint_gradients;

    std::vector<const EquilibriumPath*> path_pointers() const;
    /// True when every constraint holds.
    bool feasible(const ProblemSpec& spec) const;
    double max_violation(const ProblemSpec& spec) const;  // normalized, <= 0 when feasible
};

/// Binds a problem to its mesh and evaluates designs.
class Evaluator {
public:
    Evaluator(const ProblemSpec& spec, const MeshModel& mesh, int threads = 1);

    const ProblemSpec& spec() const { return *spec_; }
    const MeshModel& mesh() const { return *mesh_; }
    const FieldModel& field_model() const { return field_; }
    const Assembler& assembler() const { return assembler_; }
    const BoundProblem& bound() const { return bound_; }

    Actuation actuation(const DesignVector& design) const;
    SolverConfig solver_config(int steps) const;

    /// Fields and equilibrium paths only.
    Evaluation solve(const DesignVector& design, int steps = 0) const;
    /// Adds objective, constraint values and, if requested, gradients.
    Evaluation evaluate(const DesignVector& design, bool gradients) const;

    /// Value of any quantity on an evaluated design.
    double quantity(const QuantityRef& q, const Evaluation& ev) const;
    /// Gradients of several quantities on an evaluated design, sharing the
    /// per-state adjoint factorizations.
    std::vector<Eigen::VectorXd> gradients(const std::vector<QuantityRef>& qs, const Evaluation& ev) const;

private:
    const ProblemSpec* spec_;
    const MeshModel* mesh_;
    FieldModel field_;
    BoundProblem bound_;
    Assembler assembler_;
    int threads_;
};

}  // namespace varibc
