#include "varibc/errors.hpp"

#include <sstream>

namespace varibc {

namespace {
std::string point_message(double x, double y) {
    std::ostringstream os;
    os.precision(10);
    os << "point (" << x << ", " << y << ") lies outside the mesh";
    return os.str();
}
}  // namespace

PointOutsideDomain::PointOutsideDomain(double x_, double y_)
    : Error(point_message(x_, y_)), x(x_), y(y_) {}

NonPositiveJacobian::NonPositiveJacobian(std::ptrdiff_t e, double j)
    : Error("non-positive deformation Jacobian " + std::to_string(j) + " in element " +
            std::to_string(e)),
      element(e),
      jacobian(j) {}

MaxIterationsExceeded::MaxIterationsExceeded(int it, double r)
    : Error("corrector did not converge in " + std::to_string(it) +
            " iterations (residual " + std::to_string(r) + " N)"),
      iterations(it),
      residual(r) {}

PathFailed::PathFailed(double f, std::string why)
    : Error("equilibrium path failed at input fraction " + std::to_string(f) + ": " + why),
      fraction_reached(f),
      reason(std::move(why)) {}

ConfigParseError::ConfigParseError(std::size_t l, std::size_t c, const std::string& what)
    : Error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": " + what),
      line(l),
      column(c) {}

ConfigValidationError::ConfigValidationError(std::string k, const std::string& reason)
    : Error("key '" + k + "': " + reason), key(std::move(k)) {}

}  // namespace varibc
