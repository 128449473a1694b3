#pragma once

#include "varibc/optimizer.hpp"
#include "varibc/problems.hpp"

#include <string>

namespace varibc {

enum class BcMode { fixed, variable, both };

std::string to_string(BcMode mode);

/// Everything a `run` needs: the resolved problem plus run options.
struct RunConfig {
    ProblemSpec problem;
    BcMode mode = BcMode::variable;
    std::string output_dir = "results";
    bool trace_solver = false;
    int dump_every = 10;  // density snapshot period in iterations; 0 writes only the final one
    int replay_steps = 50;
    OptimizerConfig optimizer;
};

/// Parses configuration text. Built-in family defaults are applied first,
/// then every key in the file overrides them. Relative mesh paths are
/// resolved against `base_dir`.
///
/// Throws ConfigParseError (line, column) on syntax errors and
/// ConfigValidationError on unknown keys, wrong types and invalid values.
RunConfig parse_config(const std::string& text, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);

/// Fully explicit dump of a resolved configuration. parse_config() of the
/// result reproduces the same configuration.
std::string dump_config(const RunConfig& config);

/// Levenshtein distance, used for "did you mean" hints.
std::size_t edit_distance(const std::string& a, const std::string& b);

/// Parses quantity labels such as "u_out@4", "-f_p@2#3", "vf".
QuantityRef parse_quantity(const std::string& text);
/// Parses "f_in@1 < 7.5", "u_out@8 > 0.005" or "|f_p@2| < 3.75"; the
/// absolute-value form expands to two constraints.
std::vector<ConstraintSpec> parse_constraint(const std::string& text);

}  // namespace varibc
