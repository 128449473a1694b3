#pragma once

#include "varibc/design.hpp"
#include "varibc/mesh.hpp"
#include "varibc/problems.hpp"

#include <string>
#include <vector>

namespace varibc {

/// A stored expectation together with a description of how it is derived.
struct ExpectedValue {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;  // relative unless stated otherwise in `oracle`
    std::string oracle;
};

/// Small deterministic test asset: embedded mesh, problem, design and
/// expected values.
struct Fixture {
    std::string name;
    std::string description;
    MeshModel mesh;
    ProblemSpec problem;
    DesignVector design;
    std::vector<ExpectedValue> expected;

    const ExpectedValue& expect(const std::string& key) const;
};

/// "one_triangle_spring", "mini_gripper_100", "toy_arch".
const std::vector<std::string>& fixture_names();

/// Throws Error for an unknown name.
Fixture load_fixture(const std::string& name);

/// Re-derives a fixture's expected values from their oracles (closed-form
/// expressions of the fixture parameters).
std::vector<ExpectedValue> recompute_expected(const Fixture& fixture);

}  // namespace varibc
