#include "varibc/errors.hpp"
#include "varibc/fixtures.hpp"
#include "varibc/mesh_io.hpp"
#include "varibc/output.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace varibc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("varibc_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(Output, LoadDisplacementHasOneRowPerStep) {
    Fixture f = load_fixture("mini_gripper_100");
    f.problem.solver.steps = 4;
    const Evaluator ev(f.problem, f.mesh);
    const Evaluation e = ev.solve(f.design);
    ASSERT_FALSE(e.failed);
    std::ostringstream os;
    write_load_displacement(os, e.paths[0], f.design.theta, f.problem.stroke);
    const auto lines = lines_of(os.str());
    ASSERT_EQ(lines.size(), 5u);
    EXPECT_EQ(lines[0], "step,input_disp_m,F_in_N,F_p_N,lambda_x,lambda_y");
    EXPECT_EQ(lines[4].substr(0, 2), "4,");

    std::ostringstream op;
    write_output_path(op, e.paths[0], f.mesh, ev.bound().output_node, f.problem.stroke);
    EXPECT_EQ(lines_of(op.str()).size(), 6u);  // header, undeformed row, 4 steps
}

TEST(Output, DensityVtkRoundTrips) {
    const Fixture f = load_fixture("mini_gripper_100");
    const Evaluator ev(f.problem, f.mesh);
    const FieldState fs = ev.field_model().evaluate(f.design);
    const fs::path dir = scratch("vtk");
    write_density_vtk((dir / "d.vtk").string(), f.mesh, fs);
    const MeshModel back = read_vtk_file((dir / "d.vtk").string(), f.mesh.thickness());
    EXPECT_EQ(back.num_nodes(), f.mesh.num_nodes());
    EXPECT_EQ(back.num_elements(), f.mesh.num_elements());
    std::ifstream in(dir / "d.vtk");
    const std::string text((std::istreambuf_iterator<char>(in)), {});
    for (const char* field : {"rho_physical", "spring", "load", "gamma"}) EXPECT_NE(text.find(field), std::string::npos);
    fs::remove_all(dir);
}

TEST(Output, DesignSummaryRoundTrips) {
    const Fixture f = load_fixture("mini_gripper_100");
    DesignSummary s;
    s.problem = "gripper";
    s.mode = "variable";
    s.stop_reason = "converged";
    s.iterations = 12;
    s.feasible = true;
    s.objective = 0.0123456789012345678;
    s.constraints = {{"vf<0.3", 0.29999999999999999}, {"f_in@2<15", -1.0 / 3.0}};
    s.design = f.design;
    s.config = "problem = \"gripper\"\n";
    const fs::path dir = scratch("summary");
    write_design_summary((dir / "design.json").string(), s);
    const DesignSummary r = read_design_summary((dir / "design.json").string());
    EXPECT_EQ(r.problem, s.problem);
    EXPECT_EQ(r.mode, s.mode);
    EXPECT_EQ(r.iterations, s.iterations);
    EXPECT_EQ(r.objective, s.objective);
    EXPECT_EQ(r.constraints, s.constraints);
    EXPECT_EQ(r.design.flatten(), s.design.flatten());
    EXPECT_EQ(r.config, s.config);
    fs::remove_all(dir);
    EXPECT_THROW(read_design_summary((dir / "missing.json").string()), Error);
}

TEST(Output, ExecuteRunWritesArtifacts) {
    RunConfig c = parse_config(R"(problem = "gripper"
mode = "fixed"
dump_every = 1
[mesh]
element_size = 0.006
[optimizer]
max_iterations = 2
)");
    const fs::path dir = scratch("run");
    const auto summaries = execute_run(c, dir.string(), 1, nullptr);
    ASSERT_EQ(summaries.size(), 1u);
    for (const char* name : {"config.toml", "history.csv", "design.json", "density_000.vtk", "density_002.vtk",
                             "load_displacement_case1.csv", "output_path_case1.csv"})
        EXPECT_TRUE(fs::exists(dir / name)) << name;
    // the stored configuration parses back to the same dump
    std::ifstream in(dir / "config.toml");
    const std::string text((std::istreambuf_iterator<char>(in)), {});
    EXPECT_EQ(dump_config(parse_config(text)), text);

    const Evaluation ev = replay_design(read_design_summary((dir / "design.json").string()), 6, (dir / "replay").string(), 1);
    EXPECT_EQ(ev.paths[0].states.size(), 6u);
    EXPECT_TRUE(fs::exists(dir / "replay" / "load_displacement_case1.csv"));
    fs::remove_all(dir);
}
