#include "varibc/output.hpp"

#include "varibc/errors.hpp"
#include "varibc/mesh_io.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace varibc {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write '" + path + "'");
    return f;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

void write_density_vtk(const std::string& path, const MeshModel& mesh, const FieldState& fields) {
    write_vtk_file(path, mesh,
                   {{"rho_physical", to_std(fields.rho_physical)},
                    {"spring", to_std(fields.spring)},
                    {"load", to_std(fields.load)},
                    {"gamma", to_std(fields.gamma)}});
}

void write_load_displacement(std::ostream& os, const EquilibriumPath& path, double theta, double stroke) {
    os << "step,input_disp_m,F_in_N,F_p_N,lambda_x,lambda_y\n";
    for (size_t k = 0; k < path.states.size(); ++k) {
        const auto& s = path.states[k];
        os << k + 1 << ',' << fmt(s.input_fraction * stroke) << ',' << fmt(f_in(s.lambda_x, s.lambda_y, theta))
           << ',' << fmt(f_p(s.lambda_x, s.lambda_y, theta)) << ',' << fmt(s.lambda_x) << ',' << fmt(s.lambda_y)
           << '\n';
    }
}

void write_output_path(std::ostream& os, const EquilibriumPath& path, const MeshModel& mesh, int node,
                       double stroke) {
    os << "step,input_disp_m,x_m,y_m,ux_m,uy_m\n";
    const Point x0 = mesh.node(node);
    os << 0 << ',' << fmt(0.0) << ',' << fmt(x0.x()) << ',' << fmt(x0.y()) << ',' << fmt(0.0) << ',' << fmt(0.0)
       << '\n';
    for (size_t k = 0; k < path.states.size(); ++k) {
        const auto& s = path.states[k];
        const double ux = s.U[2 * node], uy = s.U[2 * node + 1];
        os << k + 1 << ',' << fmt(s.input_fraction * stroke) << ',' << fmt(x0.x() + ux) << ',' << fmt(x0.y() + uy)
           << ',' << fmt(ux) << ',' << fmt(uy) << '\n';
    }
}

void write_path_files(const std::string& dir, const Evaluator& evaluator, const Evaluation& ev) {
    const double stroke = evaluator.spec().stroke;
    for (size_t i = 0; i < ev.paths.size(); ++i) {
        const std::string suffix = "_case" + std::to_string(i + 1) + ".csv";
        auto a = open_out((fs::path(dir) / ("load_displacement" + suffix)).string());
        write_load_displacement(a, ev.paths[i], ev.design.theta, stroke);
        auto b = open_out((fs::path(dir) / ("output_path" + suffix)).string());
        write_output_path(b, ev.paths[i], evaluator.mesh(), evaluator.bound().output_node, stroke);
    }
}

void write_design_summary(const std::string& path, const DesignSummary& s) {
    nlohmann::ordered_json j;
    j["problem"] = s.problem;
    j["mode"] = s.mode;
    j["stop_reason"] = s.stop_reason;
    j["iterations"] = s.iterations;
    j["feasible"] = s.feasible;
    j["objective"] = s.objective;
    auto cons = nlohmann::ordered_json::array();
    for (const auto& [label, value] : s.constraints) cons.push_back({{"label", label}, {"value", value}});
    j["constraints"] = cons;
    auto sup = nlohmann::ordered_json::array();
    for (const auto& p : s.design.supports) sup.push_back({p.x(), p.y()});
    j["supports"] = sup;
    j["load"] = {s.design.load.x(), s.design.load.y()};
    j["theta"] = s.design.theta;
    j["rho"] = to_std(s.design.rho);
    j["config"] = s.config;
    auto f = open_out(path);
    f << j.dump(2) << '\n';
}

DesignSummary read_design_summary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open design summary '" + path + "'");
    DesignSummary s;
    try {
        const auto j = nlohmann::json::parse(in);
        s.problem = j.at("problem").get<std::string>();
        s.mode = j.at("mode").get<std::string>();
        s.stop_reason = j.value("stop_reason", "");
        s.iterations = j.value("iterations", 0);
        s.feasible = j.value("feasible", false);
        s.objective = j.value("objective", 0.0);
        for (const auto& c : j.value("constraints", nlohmann::json::array()))
            s.constraints.emplace_back(c.at("label").get<std::string>(), c.at("value").get<double>());
        for (const auto& p : j.at("supports")) s.design.supports.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        s.design.load = Point(j.at("load").at(0).get<double>(), j.at("load").at(1).get<double>());
        s.design.theta = j.at("theta").get<double>();
        const auto rho = j.at("rho").get<std::vector<double>>();
        s.design.rho = Eigen::Map<const Eigen::VectorXd>(rho.data(), static_cast<Eigen::Index>(rho.size()));
        s.config = j.at("config").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed design summary '" + path + "': " + e.what());
    }
    return s;
}

namespace {

DesignSummary summarize(const RunConfig& cfg, const ProblemSpec& spec, const OptimizationResult& r) {
    DesignSummary s;
    s.problem = spec.name;
    s.mode = spec.fixed_bcs ? "fixed" : "variable";
    s.stop_reason = to_string(r.reason);
    s.iterations = r.history.empty() ? 0 : r.history.back().iteration;
    s.feasible = r.evaluation.feasible(spec);
    s.objective = r.evaluation.objective;
    for (size_t k = 0; k < spec.constraints.size() && k < r.evaluation.constraints.size(); ++k)
        s.constraints.emplace_back(spec.constraints[k].label(), r.evaluation.constraints[k]);
    s.design = r.design;
    s.config = dump_config(cfg);
    return s;
}

std::string density_name(int iteration) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "density_%03d.vtk", iteration);
    return buf;
}

}  // namespace

std::vector<DesignSummary> execute_run(const RunConfig& config, const std::string& outdir, int threads,
                                       std::ostream* log) {
    const MeshModel mesh = build_mesh(config.problem);
    if (log) *log << "mesh: " << mesh.num_nodes() << " nodes, " << mesh.num_elements() << " elements\n";

    std::vector<BcMode> modes;
    if (config.mode == BcMode::both) modes = {BcMode::fixed, BcMode::variable};
    else modes = {config.mode};

    std::vector<DesignSummary> out;
    for (BcMode mode : modes) {
        RunConfig cfg = config;
        cfg.mode = mode;
        cfg.problem.fixed_bcs = mode == BcMode::fixed;
        const fs::path dir = config.mode == BcMode::both ? fs::path(outdir) / to_string(mode) : fs::path(outdir);
        fs::create_directories(dir);
        {
            auto f = open_out((dir / "config.toml").string());
            f << dump_config(cfg);
        }

        const ProblemSpec& spec = cfg.problem;
        const Evaluator evaluator(spec, mesh, threads);
        auto history = open_out((dir / "history.csv").string());
        int last_dumped = -1;
        const auto t0 = std::chrono::steady_clock::now();
        auto callback = [&](const IterationRecord& rec, const Evaluation& ev) {
            if (log)
                *log << to_string(mode) << " it " << rec.iteration << " obj " << rec.objective << " viol "
                     << rec.max_violation << (rec.failed ? " FAILED" : "") << '\n';
            if (config.dump_every > 0 && rec.iteration % config.dump_every == 0) {
                write_density_vtk((dir / density_name(rec.iteration)).string(), mesh, ev.fields);
                last_dumped = rec.iteration;
            }
        };
        const OptimizationResult result = run_optimization(evaluator, cfg.optimizer, &history, callback);
        const int final_it = result.history.empty() ? 0 : result.history.back().iteration;
        if (last_dumped != final_it && result.evaluation.fields.rho_physical.size() > 0)
            write_density_vtk((dir / density_name(final_it)).string(), mesh, result.evaluation.fields);
        if (!result.evaluation.failed) write_path_files(dir.string(), evaluator, result.evaluation);
        if (config.trace_solver && !result.evaluation.failed) {
            auto trace = open_out((dir / "solver_trace.csv").string());
            SolverConfig sc = evaluator.solver_config(0);
            sc.trace = &trace;
            for (size_t i = 0; i < evaluator.bound().counters.size(); ++i)
                solve_equilibrium_path(evaluator.assembler(), result.evaluation.fields, evaluator.bound().counters[i],
                                       evaluator.actuation(result.design), sc);
        }
        DesignSummary summary = summarize(cfg, spec, result);
        write_design_summary((dir / "design.json").string(), summary);
        if (log) {
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            *log << to_string(mode) << ": " << summary.stop_reason << " after " << summary.iterations
                 << " iterations, objective " << summary.objective << (summary.feasible ? "" : " (infeasible)")
                 << ", " << secs << " s\n";
            if (!result.message.empty()) *log << "  " << result.message << '\n';
        }
        out.push_back(std::move(summary));
    }
    return out;
}

Evaluation replay_design(const DesignSummary& summary, int steps, const std::string& outdir, int threads) {
    if (steps < 1) throw ConfigValidationError("steps", "must be positive");
    const RunConfig cfg = parse_config(summary.config);
    const MeshModel mesh = build_mesh(cfg.problem);
    const Evaluator evaluator(cfg.problem, mesh, threads);
    if (summary.design.rho.size() != mesh.num_designable())
        throw Error("design summary does not match the mesh of its configuration");
    Evaluation ev = evaluator.solve(summary.design, steps);
    if (ev.failed) throw Error("replay failed: " + ev.failure);
    fs::create_directories(outdir);
    write_path_files(outdir, evaluator, ev);
    write_density_vtk((fs::path(outdir) / "density_replay.vtk").string(), mesh, ev.fields);
    return ev;
}

}  // namespace varibc
