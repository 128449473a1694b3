#pragma once

#include "varibc/assembly.hpp"
#include "varibc/design.hpp"
#include "varibc/design_field.hpp"
#include "varibc/geometry.hpp"
#include "varibc/material.hpp"
#include "varibc/mesh.hpp"
#include "varibc/solver.hpp"

#include <Eigen/Core>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace varibc {

enum class ProblemFamily { gripper, bistable_airfoil, line_generator, morphing_wing, custom };

std::string to_string(ProblemFamily family);
/// Throws ConfigValidationError on an unknown name.
ProblemFamily parse_family(const std::string& name);

enum class QuantityKind { u_out, f_in, f_p, volume_fraction, path_error };

std::string to_string(QuantityKind kind);

/// One scalar quantity of a solved design. `step` is 1-based (ignored for
/// volume fraction and path error); `factor` flips or scales the value so
/// that two-sided bounds become two one-sided ones.
struct QuantityRef {
    QuantityKind kind = QuantityKind::volume_fraction;
    int step = 0;
    int load_case = 0;
    double factor = 1.0;

    std::string label() const;
};

struct ConstraintSpec {
    QuantityRef quantity;
    double bound = 0.0;
    bool upper = true;  // quantity < bound when true, quantity > bound otherwise

    /// Normalization used by the optimizer: |bound|, or 1 for a zero bound.
    double scale() const;
    std::string label() const;
};

struct ObjectiveSpec {
    QuantityRef quantity;
    bool maximize = false;
};

/// Output displacement component bound to the node nearest `point`.
struct OutputSelector {
    Point point = Point::Zero();
    int component = 0;  // 0: ux, 1: uy
    double weight = 1.0;
};

struct PrecisionPoint {
    int step = 1;  // 1-based
    Point target = Point::Zero();
};

/// Per-iteration change caps in physical units.
struct MoveLimits {
    double rho = 0.2;
    double support = 2.5e-3;  // m
    double load = 2.5e-3;     // m
    double theta = 5.0 * 3.14159265358979323846 / 180.0;  // rad
};

/// Coordinate boxes for the boundary-condition design variables.
struct DesignBounds {
    Point support_min = Point::Zero(), support_max = Point::Zero();
    Point load_min = Point::Zero(), load_max = Point::Zero();
    double theta_min = 0.0, theta_max = 0.0;
};

struct ProblemSpec {
    std::string name;
    ProblemFamily family = ProblemFamily::custom;

    DomainGeometry geometry;      // includes element size
    std::string mesh_file;        // import instead of generating when non-empty
    double thickness = 0.01;      // m

    ProjectionParams projection;
    double nu = 0.49;
    NeoHookeanVariant variant = NeoHookeanVariant::consistent;

    std::vector<Point> supports;
    std::vector<bool> support_fixed;  // kept fixed even with variable BCs
    Point load = Point::Zero();
    double theta = 0.0;
    double initial_density = 0.3;

    std::vector<OutputSelector> outputs;  // L
    double k_out = 0.0;                   // spring on every output DOF [N/m]
    Point output_point = Point::Zero();   // tracked point for path problems and counter forces
    double stroke = 5e-3;                 // |U_in| [m]
    SolverConfig solver;                  // solver.steps is M

    std::vector<Eigen::Vector2d> load_cases{Eigen::Vector2d::Zero()};  // counter force per case [N]
    std::vector<PrecisionPoint> precision_points;

    ObjectiveSpec objective;
    std::vector<ConstraintSpec> constraints;

    DesignBounds bounds;
    MoveLimits move;
    bool fixed_bcs = false;
    bool clamp_load_to_domain = true;

    int steps() const { return solver.steps; }
    int num_load_cases() const { return static_cast<int>(load_cases.size()); }
    /// Throws ConfigValidationError naming the first inconsistent field.
    void validate() const;
    DesignVector initial_design(const MeshModel& mesh) const;
};

/// Fully populated spec for a built-in family with its published parameters.
ProblemSpec make_problem(ProblemFamily family, bool fixed_bcs = false);

/// Mesh for a spec: imported when mesh_file is set, generated otherwise.
MeshModel build_mesh(const ProblemSpec& spec);

/// Problem quantities resolved against a mesh (output DOFs, counter force
/// vectors, spring list).
struct BoundProblem {
    const ProblemSpec* spec = nullptr;
    const MeshModel* mesh = nullptr;
    std::vector<std::pair<int, double>> selector;  // (dof, weight)
    std::vector<OutputSpring> springs;
    int output_node = -1;
    std::vector<Eigen::VectorXd> counters;  // per load case

    BoundProblem(const ProblemSpec& spec, const MeshModel& mesh);
};

// Scalar quantities.
double u_out(const Eigen::VectorXd& U, const std::vector<std::pair<int, double>>& selector);
double f_in(double lambda_x, double lambda_y, double theta);
double f_p(double lambda_x, double lambda_y, double theta);
/// Sum over load cases and precision points of the squared distance of the
/// tracked point (undeformed position + displacement) to its target.
/// `paths[i]` is the path of load case i. Throws Error on a missing step.
double path_error(const std::vector<const EquilibriumPath*>& paths, const Point& output_position,
                  int output_node, const std::vector<PrecisionPoint>& points);

/// Explicit partials of one state-dependent term of a quantity.
struct StateTerm {
    int load_case = 0;
    int step = 1;  // 1-based
    std::vector<std::pair<int, double>> dU;  // sparse df/dU
    Eigen::Vector2d dlambda = Eigen::Vector2d::Zero();
    double dtheta = 0.0;  // explicit df/dtheta
};

/// Value of a quantity together with everything its gradient needs.
struct QuantityEvaluation {
    double value = 0.0;
    std::vector<StateTerm> terms;
    bool has_explicit_rho = false;  // volume fraction: explicit dependence through rho_bar
};

/// Evaluates `q` for solved paths (one per load case).
QuantityEvaluation evaluate_quantity(const QuantityRef& q, const BoundProblem& problem,
                                     const std::vector<const EquilibriumPath*>& paths,
                                     const FieldState& fields, double theta);

}  // namespace varibc
