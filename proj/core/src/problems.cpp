#include "varibc/problems.hpp"

#include "varibc/errors.hpp"
#include "varibc/mesh_io.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace varibc {

namespace {

constexpr double deg = std::numbers::pi / 180.0;

Polygon disk(const Point& c, double radius, int segments = 24) {
    Polygon p;
    for (int k = 0; k < segments; ++k) {
        const double a = 2.0 * std::numbers::pi * k / segments;
        p.emplace_back(c.x() + radius * std::cos(a), c.y() + radius * std::sin(a));
    }
    return p;
}

void add_force_limits(ProblemSpec& s, int load_case, int step, double f_in_max, double f_p_max) {
    s.constraints.push_back({{QuantityKind::f_in, step, load_case, 1.0}, f_in_max, true});
    s.constraints.push_back({{QuantityKind::f_p, step, load_case, 1.0}, f_p_max, true});
    s.constraints.push_back({{QuantityKind::f_p, step, load_case, -1.0}, f_p_max, true});
}

void box_bounds(ProblemSpec& s, Point lo, Point hi) {
    s.bounds.support_min = s.bounds.load_min = lo;
    s.bounds.support_max = s.bounds.load_max = hi;
    s.bounds.theta_min = s.theta - std::numbers::pi;
    s.bounds.theta_max = s.theta + std::numbers::pi;
}

ProblemSpec gripper() {
    ProblemSpec s;
    s.name = "gripper";
    s.family = ProblemFamily::gripper;
    const double W = 0.1, jaw = 3e-3;
    s.geometry.outline = {{0, 0}, {W, 0}, {W, 0.04}, {0.08, 0.04}, {0.08, 0.06}, {W, 0.06}, {W, W}, {0, W}};
    s.geometry.element_size = 1.5e-3;
    s.geometry.nondesign_regions = {{rectangle(0.08, 0.06, W, 0.06 + jaw), RegionKind::solid},
                                    {rectangle(0.08, 0.04 - jaw, W, 0.04), RegionKind::solid}};
    s.projection.r_min = 3e-3;
    s.projection.r = 2.5e-3;
    s.projection.beta = 500;
    s.projection.t_s = 0.01;
    s.thickness = 0.01;
    const double r = s.projection.r;
    s.supports = {{r, W - r}, {r, r}};
    s.load = {r, 0.05};
    s.theta = 0.0;
    s.initial_density = 0.3;
    s.outputs = {{{W, 0.06}, 1, -1.0}, {{W, 0.04}, 1, 1.0}};
    s.output_point = {W, 0.06};
    s.k_out = 300.0;
    s.stroke = 5e-3;
    s.solver.steps = 4;
    s.objective = {{QuantityKind::u_out, 4, 0, 1.0}, true};
    s.constraints.push_back({{QuantityKind::volume_fraction, 0, 0, 1.0}, 0.3, true});
    for (int m = 1; m <= 4; ++m) add_force_limits(s, 0, m, 7.5 * m, 1.875 * m);
    box_bounds(s, {r, r}, {W - r, W - r});
    s.move = {0.2, 2.5e-3, 2.5e-3, 5.0 * deg};
    return s;
}

ProblemSpec bistable() {
    ProblemSpec s;
    s.name = "bistable_airfoil";
    s.family = ProblemFamily::bistable_airfoil;
    const double c = 0.2, h = 1e-3;
    s.geometry = naca0012_outline(c, 1.0, h);
    s.geometry.element_size = h;
    s.projection.r_min = 4e-3;
    s.projection.r = 2e-3;
    s.projection.beta = 2000;
    s.projection.t_s = 0.01;
    s.thickness = 0.01;
    const double y6 = naca0012_half_thickness(c, 0.06);
    s.supports = {{0.06, y6}, {0.06, -y6}, {0.14, -naca0012_half_thickness(c, 0.14)}};
    s.load = {0.06, 0.0};
    s.theta = 0.0;
    s.initial_density = 0.4;
    s.outputs = {{{c, 0.0}, 1, -1.0}};
    s.output_point = {c, 0.0};
    s.k_out = 100.0;
    s.stroke = 2.5e-3;
    s.solver.steps = 8;
    s.objective = {{QuantityKind::f_in, 8, 0, 1.0}, false};
    s.constraints.push_back({{QuantityKind::volume_fraction, 0, 0, 1.0}, 0.4, true});
    s.constraints.push_back({{QuantityKind::u_out, 8, 0, 1.0}, 5e-3, false});
    s.constraints.push_back({{QuantityKind::f_in, 1, 0, 1.0}, 2.0, false});
    for (int m = 1; m <= 6; ++m)
        s.constraints.push_back(
            {{QuantityKind::f_in, m, 0, 1.0}, 15.0 * std::sin(std::numbers::pi * m / 6.0) + 5.0, true});
    for (int m = 1; m <= 8; ++m) {
        s.constraints.push_back({{QuantityKind::f_p, m, 0, 1.0}, 5.0, true});
        s.constraints.push_back({{QuantityKind::f_p, m, 0, -1.0}, 5.0, true});
    }
    // supports may leave the airfoil; the actuator is clamped back into it
    box_bounds(s, {-0.02, -0.035}, {c + 0.02, 0.035});
    s.move = {0.05, 0.5e-3, 0.5e-3, 1.0 * deg};
    return s;
}

ProblemSpec line_generator() {
    ProblemSpec s;
    s.name = "line_generator";
    s.family = ProblemFamily::line_generator;
    const double W = 0.16, H = 0.08, out = 6e-3;
    s.geometry.outline = rectangle(0, 0, W, H);
    s.geometry.element_size = 1.2e-3;
    s.geometry.nondesign_regions = {{rectangle(W - out, H - out, W, H), RegionKind::solid}};
    s.projection.r_min = 2.4e-3;
    s.projection.r = 3e-3;
    s.projection.beta = 500;
    s.projection.t_s = 0.01;
    s.thickness = 0.01;
    const double r = s.projection.r;
    s.supports = {{0.04, r}, {0.12, r}};
    s.load = {0.08, r};
    s.theta = std::numbers::pi / 2.0;
    s.initial_density = 0.2;
    s.output_point = {W, H};
    s.k_out = 0.0;
    s.stroke = 1e-2;
    s.solver.steps = 4;
    s.load_cases = {Eigen::Vector2d::Zero(), Eigen::Vector2d(-5.0, 0.0), Eigen::Vector2d(0.0, -5.0)};
    for (int m = 1; m <= 4; ++m) s.precision_points.push_back({m, {W + 0.02 * m / 4.0, H}});
    s.objective = {{QuantityKind::path_error, 0, 0, 1.0}, false};
    s.constraints.push_back({{QuantityKind::volume_fraction, 0, 0, 1.0}, 0.2, true});
    for (int i = 0; i < 3; ++i)
        for (int m = 1; m <= 4; ++m) add_force_limits(s, i, m, 20.0, 5.0);
    box_bounds(s, {r, r}, {W - r, H - r});
    s.move = {0.2, 3e-3, 3e-3, 2.0 * deg};
    return s;
}

// Band of thickness [inner, outer] below the upper surface of the section,
// from x = x0 to x = x1.
Polygon upper_band(double chord, double x0, double x1, double inner, double outer) {
    Polygon top, bottom;
    const int n = 60;
    for (int k = 0; k <= n; ++k) {
        const double x = x0 + (x1 - x0) * k / n;
        const double y = naca0012_half_thickness(chord, x);
        top.emplace_back(x, y - inner);
        bottom.emplace_back(x, y - outer);
    }
    Polygon p(bottom.begin(), bottom.end());
    for (auto it = top.rbegin(); it != top.rend(); ++it) p.push_back(*it);
    return p;
}

ProblemSpec morphing_wing() {
    ProblemSpec s;
    s.name = "morphing_wing";
    s.family = ProblemFamily::morphing_wing;
    const double c = 0.2, h = 0.5e-3, x_end = 0.3 * c;
    const double skin = 1e-3, gap = 1e-3;
    s.geometry = naca0012_outline(c, 0.3, h);
    s.geometry.element_size = h;
    s.projection.r_min = 1e-3;
    s.projection.r = 2e-3;
    s.projection.beta = 500;
    s.projection.t_s = 0.01;
    s.thickness = 0.01;
    s.output_point = {0.0, 0.0};
    // skin on the upper surface, a void gap below it, a solid pad at the output
    s.geometry.nondesign_regions = {
        {upper_band(c, 0.0, x_end, skin, skin + gap), RegionKind::void_},
        {upper_band(c, 0.0, x_end, -1e-3, skin), RegionKind::solid},
        {disk(s.output_point, 2.5e-3), RegionKind::solid},
    };
    s.supports = {{0.05, 0.006}, {0.05, -0.006}, {x_end, naca0012_half_thickness(c, x_end) + 1.5e-3}};
    s.support_fixed = {false, false, true};
    s.load = {0.03, -0.007};
    s.theta = 0.0;
    s.initial_density = 0.3;
    s.k_out = 0.0;
    s.stroke = 2e-3;
    s.solver.steps = 1;
    s.load_cases = {Eigen::Vector2d::Zero(), Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0)};
    s.precision_points = {{1, s.output_point + Point(2.5e-3, -5e-3)}};
    s.objective = {{QuantityKind::path_error, 0, 0, 1.0}, false};
    s.constraints.push_back({{QuantityKind::volume_fraction, 0, 0, 1.0}, 0.3, true});
    for (int i = 0; i < 3; ++i) add_force_limits(s, i, 1, 20.0, 5.0);
    box_bounds(s, {-0.03, -0.04}, {x_end + 0.03, 0.04});
    s.move = {0.2, 1e-3, 1e-3, 5.0 * deg};
    return s;
}

}  // namespace

std::string to_string(ProblemFamily family) {
    switch (family) {
        case ProblemFamily::gripper: return "gripper";
        case ProblemFamily::bistable_airfoil: return "bistable_airfoil";
        case ProblemFamily::line_generator: return "line_generator";
        case ProblemFamily::morphing_wing: return "morphing_wing";
        case ProblemFamily::custom: return "custom";
    }
    return "custom";
}

ProblemFamily parse_family(const std::string& name) {
    for (auto f : {ProblemFamily::gripper, ProblemFamily::bistable_airfoil, ProblemFamily::line_generator,
                   ProblemFamily::morphing_wing, ProblemFamily::custom})
        if (to_string(f) == name) return f;
    throw ConfigValidationError("problem", "unknown problem family '" + name + "'");
}

std::string to_string(QuantityKind kind) {
    switch (kind) {
        case QuantityKind::u_out: return "u_out";
        case QuantityKind::f_in: return "f_in";
        case QuantityKind::f_p: return "f_p";
        case QuantityKind::volume_fraction: return "vf";
        case QuantityKind::path_error: return "path_error";
    }
    return "?";
}

std::string QuantityRef::label() const {
    std::ostringstream os;
    if (factor == -1.0) os << '-';
    else if (factor != 1.0) os << factor << '*';
    os << to_string(kind);
    if (kind != QuantityKind::volume_fraction && kind != QuantityKind::path_error) {
        os << '@' << step;
        if (load_case != 0) os << "#" << load_case + 1;
    }
    return os.str();
}

double ConstraintSpec::scale() const { return bound == 0.0 ? 1.0 : std::abs(bound); }

std::string ConstraintSpec::label() const {
    std::ostringstream os;
    os << quantity.label() << (upper ? "<" : ">") << bound;
    return os.str();
}

void ProblemSpec::validate() const {
    projection.validate();
    solver.validate();
    if (supports.empty()) throw ConfigValidationError("supports", "at least one support is required");
    if (!support_fixed.empty() && support_fixed.size() != supports.size())
        throw ConfigValidationError("support_fixed", "needs one flag per support");
    if (!(stroke > 0.0)) throw ConfigValidationError("input_displacement", "must be positive");
    if (!(thickness > 0.0)) throw ConfigValidationError("thickness", "must be positive");
    if (!(nu >= 0.0 && nu < 0.5)) throw ConfigValidationError("nu", "must lie in [0, 0.5)");
    if (!(k_out >= 0.0)) throw ConfigValidationError("k_out", "must be non-negative");
    if (!(initial_density >= 0.0 && initial_density <= 1.0))
        throw ConfigValidationError("initial_density", "must lie in [0, 1]");
    if (load_cases.empty()) throw ConfigValidationError("load_cases", "at least one load case is required");
    if (mesh_file.empty() && !(geometry.element_size > 0.0))
        throw ConfigValidationError("element_size", "must be positive");

    auto check_ref = [&](const QuantityRef& q, const std::string& where) {
        switch (q.kind) {
            case QuantityKind::u_out:
                if (outputs.empty()) throw ConfigValidationError(where, "u_out needs at least one output");
                [[fallthrough]];
            case QuantityKind::f_in:
            case QuantityKind::f_p:
                if (q.step < 1 || q.step > steps())
                    throw ConfigValidationError(where, "step " + std::to_string(q.step) + " outside 1.." +
                                                           std::to_string(steps()));
                if (q.load_case < 0 || q.load_case >= num_load_cases())
                    throw ConfigValidationError(where, "load case out of range");
                break;
            case QuantityKind::path_error:
                if (precision_points.empty())
                    throw ConfigValidationError(where, "path error needs precision points");
                break;
            case QuantityKind::volume_fraction: break;
        }
    };
    check_ref(objective.quantity, "objective");
    for (const auto& c : constraints) {
        check_ref(c.quantity, "constraint " + c.label());
        if (!std::isfinite(c.bound)) throw ConfigValidationError("constraint " + c.label(), "bound must be finite");
    }
    for (const auto& p : precision_points)
        if (p.step < 1 || p.step > steps())
            throw ConfigValidationError("precision_points", "step outside 1..M");
    for (int k = 0; k < 2; ++k) {
        if (bounds.support_min[k] > bounds.support_max[k])
            throw ConfigValidationError("bounds.support", "min exceeds max");
        if (bounds.load_min[k] > bounds.load_max[k]) throw ConfigValidationError("bounds.load", "min exceeds max");
    }
    if (bounds.theta_min > bounds.theta_max) throw ConfigValidationError("bounds.theta", "min exceeds max");
    if (!(move.rho > 0.0 && move.support > 0.0 && move.load > 0.0 && move.theta > 0.0))
        throw ConfigValidationError("move", "move limits must be positive");
}

DesignVector ProblemSpec::initial_design(const MeshModel& mesh) const {
    DesignVector d;
    d.rho = Eigen::VectorXd::Constant(mesh.num_designable(), initial_density);
    d.supports = supports;
    d.load = clamp_load_to_domain ? mesh.clamp_inside(load) : load;
    d.theta = theta;
    return d;
}

ProblemSpec make_problem(ProblemFamily family, bool fixed_bcs) {
    ProblemSpec s;
    switch (family) {
        case ProblemFamily::gripper: s = gripper(); break;
        case ProblemFamily::bistable_airfoil: s = bistable(); break;
        case ProblemFamily::line_generator: s = line_generator(); break;
        case ProblemFamily::morphing_wing: s = morphing_wing(); break;
        case ProblemFamily::custom:
            throw ConfigValidationError("problem", "custom problems are defined in the configuration file");
    }
    s.fixed_bcs = fixed_bcs;
    return s;
}

MeshModel build_mesh(const ProblemSpec& spec) {
    if (!spec.mesh_file.empty()) return import_mesh(spec.mesh_file, spec.thickness);
    return generate_mesh(spec.geometry, spec.thickness);
}

BoundProblem::BoundProblem(const ProblemSpec& s, const MeshModel& m) : spec(&s), mesh(&m) {
    for (const auto& o : s.outputs) {
        if (o.component != 0 && o.component != 1) throw ConfigValidationError("outputs", "component must be x or y");
        const int dof = 2 * m.nearest_node(o.point) + o.component;
        selector.emplace_back(dof, o.weight);
        if (s.k_out > 0.0) springs.push_back({dof, s.k_out});
    }
    output_node = m.nearest_node(s.output_point);
    for (const auto& f : s.load_cases) {
        Eigen::VectorXd c = Eigen::VectorXd::Zero(m.num_dofs());
        c[2 * output_node] = f.x();
        c[2 * output_node + 1] = f.y();
        counters.push_back(std::move(c));
    }
}

double u_out(const Eigen::VectorXd& U, const std::vector<std::pair<int, double>>& selector) {
    double v = 0.0;
    for (const auto& [dof, w] : selector) v += w * U[dof];
    return v;
}

double f_in(double lambda_x, double lambda_y, double theta) {
    return lambda_x * std::cos(theta) + lambda_y * std::sin(theta);
}

double f_p(double lambda_x, double lambda_y, double theta) {
    return -lambda_x * std::sin(theta) + lambda_y * std::cos(theta);
}

namespace {

const EquilibriumState& state_at(const std::vector<const EquilibriumPath*>& paths, int load_case, int step) {
    if (load_case < 0 || load_case >= static_cast<int>(paths.size()) || !paths[load_case])
        throw Error("missing path for load case " + std::to_string(load_case + 1));
    const auto& states = paths[load_case]->states;
    if (step < 1 || step > static_cast<int>(states.size()))
        throw Error("missing path step " + std::to_string(step));
    return states[step - 1];
}

}  // namespace

double path_error(const std::vector<const EquilibriumPath*>& paths, const Point& output_position,
                  int output_node, const std::vector<PrecisionPoint>& points) {
    double e = 0.0;
    for (int i = 0; i < static_cast<int>(paths.size()); ++i)
        for (const auto& p : points) {
            const auto& U = state_at(paths, i, p.step).U;
            const Point pos = output_position + Point(U[2 * output_node], U[2 * output_node + 1]);
            e += (pos - p.target).squaredNorm();
        }
    return e;
}

QuantityEvaluation evaluate_quantity(const QuantityRef& q, const BoundProblem& problem,
                                     const std::vector<const EquilibriumPath*>& paths,
                                     const FieldState& fields, double theta) {
    QuantityEvaluation out;
    const double k = q.factor;
    switch (q.kind) {
        case QuantityKind::volume_fraction:
            out.value = k * volume_fraction(fields.rho_physical, *problem.mesh);
            out.has_explicit_rho = true;
            break;
        case QuantityKind::u_out: {
            const auto& s = state_at(paths, q.load_case, q.step);
            out.value = k * u_out(s.U, problem.selector);
            StateTerm t{q.load_case, q.step, {}, Eigen::Vector2d::Zero(), 0.0};
            for (const auto& [dof, w] : problem.selector) t.dU.emplace_back(dof, k * w);
            out.terms.push_back(std::move(t));
            break;
        }
        case QuantityKind::f_in:
        case QuantityKind::f_p: {
            const auto& s = state_at(paths, q.load_case, q.step);
            const double c = std::cos(theta), sn = std::sin(theta);
            const double fin = f_in(s.lambda_x, s.lambda_y, theta);
            const double fp = f_p(s.lambda_x, s.lambda_y, theta);
            StateTerm t{q.load_case, q.step, {}, Eigen::Vector2d::Zero(), 0.0};
            if (q.kind == QuantityKind::f_in) {
                out.value = k * fin;
                t.dlambda = k * Eigen::Vector2d(c, sn);
                t.dtheta = k * fp;
            } else {
                out.value = k * fp;
                t.dlambda = k * Eigen::Vector2d(-sn, c);
                t.dtheta = -k * fin;
            }
            out.terms.push_back(std::move(t));
            break;
        }
        case QuantityKind::path_error: {
            const int n = problem.output_node;
            const Point x0 = problem.mesh->node(n);
            for (int i = 0; i < static_cast<int>(paths.size()); ++i)
                for (const auto& p : problem.spec->precision_points) {
                    const auto& U = state_at(paths, i, p.step).U;
                    const Point d = x0 + Point(U[2 * n], U[2 * n + 1]) - p.target;
                    out.value += k * d.squaredNorm();
                    StateTerm t{i, p.step, {{2 * n, 2.0 * k * d.x()}, {2 * n + 1, 2.0 * k * d.y()}},
                                Eigen::Vector2d::Zero(), 0.0};
                    out.terms.push_back(std::move(t));
                }
            break;
        }
    }
    return out;
}

}  // namespace varibc
