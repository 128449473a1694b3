#pragma once

#include "varibc/evaluation.hpp"
#include "varibc/mma.hpp"

#include <Eigen/Core>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace varibc {

struct OptimizerConfig {
    int max_iterations = 400;  // number of MMA updates
    double density_change_tol = 1e-4;
    int oscillation_window = 10;
    int max_consecutive_failures = 10;
    MmaSettings mma;
};

struct IterationRecord {
    int iteration = 0;
    double objective = 0.0;               // raw quantity value (NaN for failed solves)
    std::vector<double> constraints;      // raw values, spec order
    double max_violation = 0.0;           // normalized
    double mean_drho = 0.0;               // against the previous recorded iterate
    double max_drho = 0.0;
    bool feasible = false;
    bool failed = false;
    int solver_iterations = 0;
    int bisections = 0;
    bool oscillating = false;
    bool mma_fallback = false;            // the update that produced this iterate
    std::vector<Point> supports;
    Point load = Point::Zero();
    double theta = 0.0;
};

enum class StopReason { converged, max_iterations, repeated_failure };

std::string to_string(StopReason reason);

struct OptimizationResult {
    DesignVector design;   // last successfully evaluated iterate
    Evaluation evaluation;  // its evaluation
    std::vector<IterationRecord> history;
    StopReason reason = StopReason::max_iterations;
    std::string message;
};

/// Stop when the latest record is a successful, feasible iterate whose mean
/// density change is below `tol`. The initial iterate never stops the run.
bool convergence_check(const std::vector<IterationRecord>& history, double tol);

/// True when the objective differences over the last `window` records
/// alternate in sign at least three times out of four.
bool detect_oscillation(const std::vector<IterationRecord>& history, int window);

/// Writes the CSV header of the history file for `spec`.
void write_history_header(std::ostream& os, const ProblemSpec& spec);
void write_history_row(std::ostream& os, const IterationRecord& rec);

/// Variable activity and bounds of the flat design vector.
struct DesignBox {
    Eigen::VectorXd lower, upper, move;
    std::vector<bool> active;
};

DesignBox design_box(const ProblemSpec& spec, const DesignLayout& layout);

using IterationCallback = std::function<void(const IterationRecord&, const Evaluation&)>;

/// Runs the design loop. `history` (optional) receives the CSV, flushed
/// per iteration. `callback` is invoked after every evaluated iterate.
OptimizationResult run_optimization(const Evaluator& evaluator, const OptimizerConfig& config,
                                    std::ostream* history = nullptr, const IterationCallback& callback = {});

}  // namespace varibc
