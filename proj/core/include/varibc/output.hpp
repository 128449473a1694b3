#pragma once

#include "varibc/config.hpp"
#include "varibc/evaluation.hpp"
#include "varibc/optimizer.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace varibc {

/// Density snapshot with cell fields rho_physical, spring, load, gamma.
void write_density_vtk(const std::string& path, const MeshModel& mesh, const FieldState& fields);

/// Columns: step, input_disp_m, F_in_N, F_p_N, lambda_x, lambda_y.
void write_load_displacement(std::ostream& os, const EquilibriumPath& path, double theta, double stroke);
/// Columns: step, input_disp_m, x_m, y_m, ux_m, uy_m of the tracked node.
void write_output_path(std::ostream& os, const EquilibriumPath& path, const MeshModel& mesh, int node,
                       double stroke);

/// Writes load_displacement_caseI.csv and output_path_caseI.csv for every
/// load case into `dir`.
void write_path_files(const std::string& dir, const Evaluator& evaluator, const Evaluation& ev);

/// Final design of a run, with enough context to re-solve it.
struct DesignSummary {
    std::string problem;
    std::string mode;  // "fixed" or "variable"
    std::string stop_reason;
    int iterations = 0;
    bool feasible = false;
    double objective = 0.0;
    std::vector<std::pair<std::string, double>> constraints;  // label, raw value
    DesignVector design;
    std::string config;  // resolved configuration text
};

void write_design_summary(const std::string& path, const DesignSummary& summary);
DesignSummary read_design_summary(const std::string& path);

/// Runs the optimization(s) of a configuration and writes every artifact
/// under `outdir` (a subdirectory per BC mode when both are requested).
/// Progress lines go to `log` when non-null.
std::vector<DesignSummary> execute_run(const RunConfig& config, const std::string& outdir, int threads,
                                       std::ostream* log);

/// Re-solves a stored design with `steps` increments and writes the path
/// files into `outdir`. Returns the evaluated paths.
Evaluation replay_design(const DesignSummary& summary, int steps, const std::string& outdir, int threads);

}  // namespace varibc
