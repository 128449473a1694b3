#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace varibc {

struct CheckResult {
    std::string suite;
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Property and gradient checks on the built-in fixtures: material
/// derivatives, projection identities, force decomposition, analytic
/// single-element response, bisection recovery and adjoint gradients.
std::vector<CheckResult> run_verification();

/// Prints one line per check; returns true when all passed.
bool print_verification(std::ostream& os, const std::vector<CheckResult>& results);

}  // namespace varibc
