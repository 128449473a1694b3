#include "varibc/config.hpp"
#include "varibc/errors.hpp"
#include "varibc/mesh_io.hpp"
#include "varibc/output.hpp"
#include "varibc/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace varibc;

namespace {

// One JSON object per line on stderr so scripts can parse failures.
void report_error(const std::string& kind, const std::string& message, const nlohmann::json& extra = {}) {
    nlohmann::json j{{"error", kind}, {"message", message}};
    if (extra.is_object()) j.update(extra);
    std::cerr << j.dump() << '\n';
}

int cmd_run(const std::string& path, const std::string& out, int threads, int max_iterations,
            const std::string& mode, bool quiet) {
    RunConfig cfg = load_config(path);
    if (max_iterations >= 0) cfg.optimizer.max_iterations = max_iterations;
    if (!mode.empty()) {
        cfg.mode = mode == "fixed" ? BcMode::fixed : mode == "both" ? BcMode::both : BcMode::variable;
        cfg.problem.fixed_bcs = cfg.mode == BcMode::fixed;
    }
    const std::string dir = out.empty() ? cfg.output_dir : out;
    const auto summaries = execute_run(cfg, dir, threads, quiet ? nullptr : &std::cout);
    for (const auto& s : summaries)
        std::cout << s.mode << ": objective " << s.objective << ", " << (s.feasible ? "feasible" : "infeasible")
                  << ", " << s.stop_reason << '\n';
    return 0;
}

int cmd_mesh(const std::string& path, const std::string& out) {
    const RunConfig cfg = load_config(path);
    const MeshModel mesh = build_mesh(cfg.problem);
    const fs::path dir = out.empty() ? fs::path(cfg.output_dir) : fs::path(out);
    fs::create_directories(dir);
    write_mesh_file((dir / "mesh.txt").string(), mesh);
    write_vtk_file((dir / "mesh.vtk").string(), mesh, {});
    std::cout << "mesh: " << mesh.num_nodes() << " nodes, " << mesh.num_elements() << " elements, "
              << mesh.num_designable() << " designable -> " << dir.string() << '\n';
    return 0;
}

int cmd_replay(const std::string& path, int steps, const std::string& out, int threads) {
    const DesignSummary summary = read_design_summary(path);
    int n = steps;
    if (n <= 0) n = parse_config(summary.config).replay_steps;
    const std::string dir = out.empty() ? (fs::path(path).parent_path() / "replay").string() : out;
    const Evaluation ev = replay_design(summary, n, dir, threads);
    std::cout << "replayed " << summary.problem << " (" << summary.mode << ") with " << n << " increments, "
              << ev.paths.size() << " load case(s) -> " << dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Topology optimization of compliant mechanisms with design-dependent supports and actuator"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "Worker threads for load-case solves")
        ->envname("VARIBC_THREADS")
        ->check(CLI::PositiveNumber);

    std::string config_path, out, mode, summary_path;
    int max_iterations = -1, steps = 0;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "Optimize the problem described by a configuration file");
    run->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "Output directory (overrides output_dir)");
    run->add_option("--max-iterations", max_iterations, "Override the optimizer iteration cap");
    run->add_option("--mode", mode, "Boundary-condition mode")->check(CLI::IsMember({"fixed", "variable", "both"}));
    run->add_flag("--quiet", quiet, "Only print the final summary");

    auto* verify = app.add_subcommand("verify", "Run the property and gradient checks on the built-in fixtures");

    auto* mesh = app.add_subcommand("mesh", "Generate or import the mesh of a configuration and write it");
    mesh->add_option("config", config_path, "Configuration file")->required()->check(CLI::ExistingFile);
    mesh->add_option("--out", out, "Output directory");

    auto* replay = app.add_subcommand("replay", "Re-solve a stored design in small increments");
    replay->add_option("summary", summary_path, "design.json written by run")->required()->check(CLI::ExistingFile);
    replay->add_option("--steps", steps, "Number of displacement increments (default: replay_steps)");
    replay->add_option("--out", out, "Output directory (default: <summary dir>/replay)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) return cmd_run(config_path, out, threads, max_iterations, mode, quiet);
        if (*verify) return print_verification(std::cout, run_verification()) ? 0 : 1;
        if (*mesh) return cmd_mesh(config_path, out);
        if (*replay) return cmd_replay(summary_path, steps, out, threads);
    } catch (const ConfigParseError& e) {
        report_error("ConfigParseError", e.what(), {{"line", e.line}, {"column", e.column}});
        return 2;
    } catch (const ConfigValidationError& e) {
        report_error("ConfigValidationError", e.what(), {{"key", e.key}});
        return 2;
    } catch (const PathFailed& e) {
        report_error("PathFailed", e.what(), {{"fraction_reached", e.fraction_reached}});
        return 3;
    } catch (const Error& e) {
        report_error("Error", e.what());
        return 1;
    } catch (const std::exception& e) {
        report_error("InternalError", e.what());
        return 1;
    }
    return 0;
}
