#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace varibc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A query point does not lie inside any element of the mesh.
class PointOutsideDomain : public Error {
public:
    PointOutsideDomain(double x, double y);
    double x, y;
};

/// An element was inverted (det F <= 0) while evaluating stress.
class NonPositiveJacobian : public Error {
public:
    explicit NonPositiveJacobian(std::ptrdiff_t element, double jacobian = 0.0);
    std::ptrdiff_t element;
    double jacobian;
};

/// Factorization of the tangent stiffness failed.
class SingularTangent : public Error {
public:
    using Error::Error;
};

/// The 2x2 input-point response matrix is numerically singular.
class Singular2x2 : public Error {
public:
    using Error::Error;
};

class MaxIterationsExceeded : public Error {
public:
    MaxIterationsExceeded(int iterations, double residual);
    int iterations;
    double residual;
};

/// A displacement path could not be completed even after step bisection.
class PathFailed : public Error {
public:
    PathFailed(double fraction_reached, std::string reason);
    double fraction_reached;
    std::string reason;
};

/// Adjoint reduced system N K^-1 [Fx Fy] is singular.
class SingularReducedSystem : public Error {
public:
    using Error::Error;
};

/// Syntax error in a configuration file.
class ConfigParseError : public Error {
public:
    ConfigParseError(std::size_t line, std::size_t column, const std::string& what);
    std::size_t line, column;
};

/// Semantically invalid configuration value or key.
class ConfigValidationError : public Error {
public:
    ConfigValidationError(std::string key, const std::string& reason);
    std::string key;
};

class MeshError : public Error {
public:
    using Error::Error;
};

}  // namespace varibc
