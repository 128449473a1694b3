#include "varibc/fixtures.hpp"

#include "varibc/errors.hpp"
#include "varibc/mesh_io.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace varibc {

#include "fixture_meshes.inc"

namespace {

MeshModel embedded_mesh(const char* text, double thickness) {
    std::istringstream in(text);
    return read_mesh(in, thickness);
}

// Single triangle carried by a support field centred on it. The input
// point is the centroid too, so the whole element translates rigidly and
// only the lumped springs react: lambda = k_e * (input displacement).
Fixture one_triangle_spring() {
    Fixture f;
    f.name = "one_triangle_spring";
    f.description = "single element on a support field, rigid translation against the lumped springs";
    const double L = 0.01;
    f.mesh = MeshModel({{0, 0}, {L, 0}, {0, L}}, {{0, 1, 2}}, {ElementTag::designable}, 0.01);
    ProblemSpec& s = f.problem;
    s.name = f.name;
    s.thickness = 0.01;
    s.geometry.element_size = L;
    s.projection.r = 2.5e-3;
    s.projection.r_min = 2e-3;
    const Point c(L / 3.0, L / 3.0);
    s.supports = {c};
    s.load = c;
    s.theta = 0.4;
    s.initial_density = 1.0;
    s.output_point = c;
    s.stroke = 1e-4;
    s.solver.steps = 2;
    s.objective = {{QuantityKind::f_in, 2, 0, 1.0}, false};
    s.bounds.support_min = s.bounds.load_min = Point(0, 0);
    s.bounds.support_max = s.bounds.load_max = Point(L, L);
    s.bounds.theta_min = -std::numbers::pi;
    s.bounds.theta_max = std::numbers::pi;
    f.design = s.initial_design(f.mesh);
    f.expected = recompute_expected(f);
    return f;
}

// Coarse gripper outline (no jaw strips) with radii scaled to the ~15 mm
// elements, generic support and actuator positions and a non-uniform
// density field.
Fixture mini_gripper_100() {
    Fixture f;
    f.name = "mini_gripper_100";
    f.description = "coarse gripper for adjoint-versus-finite-difference checks";
    ProblemSpec s = make_problem(ProblemFamily::gripper);
    s.name = f.name;
    s.geometry.nondesign_regions.clear();
    s.geometry.element_size = 0.015;
    f.mesh = embedded_mesh(kMiniGripperMesh, s.thickness);
    s.projection.r = 0.015;
    s.projection.r_min = 0.02;
    s.solver.steps = 2;
    s.supports = {{0.02, 0.083}, {0.013, 0.021}};
    s.load = {0.024, 0.047};
    s.theta = 0.3;
    s.objective = {{QuantityKind::u_out, 2, 0, 1.0}, true};
    s.constraints = {{{QuantityKind::volume_fraction, 0, 0, 1.0}, 0.3, true},
                     {{QuantityKind::f_in, 2, 0, 1.0}, 15.0, true},
                     {{QuantityKind::f_p, 1, 0, 1.0}, 1.875, true}};
    s.precision_points = {{1, {0.101, 0.058}}, {2, {0.102, 0.057}}};
    f.problem = s;
    f.design = s.initial_design(f.mesh);
    for (int j = 0; j < f.design.rho.size(); ++j) f.design.rho[j] = 0.55 + 0.35 * std::sin(1.3 * j + 0.7);
    f.expected = recompute_expected(f);
    return f;
}

// Shallow two-bar arch (rise 20 mm, half-span 50 mm, bars 0.8 mm thick)
// pushed down at the apex through twice its rise.
Fixture toy_arch() {
    Fixture f;
    f.name = "toy_arch";
    f.description = "snap-through arch; the nominal two-step path needs bisection";
    ProblemSpec& s = f.problem;
    s.name = f.name;
    s.thickness = 0.01;
    f.mesh = embedded_mesh(kToyArchMesh, s.thickness);
    s.geometry.element_size = 2.7e-3;  // 40 segments per bar
    s.projection.r = 1.5e-3;
    s.projection.r_min = 2e-3;
    const double rise = 0.02;
    s.supports = {{-0.05, 0.0}, {0.05, 0.0}};
    s.load = {0.0, rise};
    s.theta = -std::numbers::pi / 2.0;
    s.initial_density = 1.0;
    s.output_point = s.load;
    s.stroke = 2.0 * rise;
    s.solver.steps = 2;
    s.objective = {{QuantityKind::f_in, 2, 0, 1.0}, false};
    s.bounds.support_min = s.bounds.load_min = Point(-0.05, 0.0);
    s.bounds.support_max = s.bounds.load_max = Point(0.05, rise);
    s.bounds.theta_min = -std::numbers::pi;
    s.bounds.theta_max = 0.0;
    f.design = s.initial_design(f.mesh);
    f.expected = recompute_expected(f);
    return f;
}

}  // namespace

const ExpectedValue& Fixture::expect(const std::string& key) const {
    for (const auto& e : expected)
        if (e.name == key) return e;
    throw Error("fixture " + name + " has no expected value '" + key + "'");
}

const std::vector<std::string>& fixture_names() {
    static const std::vector<std::string> names{"one_triangle_spring", "mini_gripper_100", "toy_arch"};
    return names;
}

Fixture load_fixture(const std::string& name) {
    if (name == "one_triangle_spring") return one_triangle_spring();
    if (name == "mini_gripper_100") return mini_gripper_100();
    if (name == "toy_arch") return toy_arch();
    throw Error("unknown fixture '" + name + "'");
}

std::vector<ExpectedValue> recompute_expected(const Fixture& f) {
    std::vector<ExpectedValue> out;
    if (f.name == "one_triangle_spring") {
        const auto& p = f.problem.projection;
        const double area = f.mesh.volume(0) / f.mesh.thickness();
        const double shear = p.E_s / (2.0 * (1.0 + p.nu_s));
        out.push_back({"force_per_displacement", shear / p.t_s * area, 1e-9,
                       "k_e = (G_s / t_s) * A_e with the support at the centroid; rigid translation gives "
                       "F_in = k_e * |u|, F_p = 0"});
    } else if (f.name == "toy_arch") {
        out.push_back({"zero_crossing", f.problem.load.y(), 0.05,
                       "two-bar truss: the vertical force vanishes where the bars pass the horizontal, "
                       "apex deflection = rise"});
    } else if (f.name == "mini_gripper_100") {
        out.push_back({"num_elements", 99.0, 0.0, "frozen mesh"});
        out.push_back({"num_nodes", 67.0, 0.0, "frozen mesh"});
    }
    return out;
}

}  // namespace varibc
