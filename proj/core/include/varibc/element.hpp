#pragma once

#include "varibc/material.hpp"

#include <Eigen/Core>

namespace varibc {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using ShapeGradients = Eigen::Matrix<double, 2, 3>;

/// Geometry of one constant-strain triangle: shape-function gradients
/// (row 0: d/dx, row 1: d/dy) and volume A*t. DOF order is
/// [u1x u1y u2x u2y u3x u3y].
struct ElementGeometry {
    ShapeGradients grad;
    double volume;
    long id = -1;  // reported in NonPositiveJacobian
};

struct ElementResponse {
    Vector6 force;
    Matrix6 tangent;
};

// The element blends a total Lagrangian Neo-Hookean model evaluated at the
// scaled displacement gamma*u with small-strain elasticity:
//   energy  = E V [ psi(I + gamma grad u) + (1 - gamma^2) 1/2 eps.D0.eps ]
//   force   = gamma f_NL(gamma u) + (1 - gamma^2) f_L(u)
//   tangent = gamma^2 k_NL(gamma u) + (1 - gamma^2) k_L
// With the consistent material variant, force is the exact gradient of the
// energy and tangent the exact derivative of force.

double element_energy(const ElementGeometry& geo, const Vector6& u, double modulus, double gamma,
                      const MaterialParams& material);
Vector6 element_internal_force(const ElementGeometry& geo, const Vector6& u, double modulus,
                               double gamma, const MaterialParams& material);
Matrix6 element_tangent(const ElementGeometry& geo, const Vector6& u, double modulus, double gamma,
                        const MaterialParams& material);
ElementResponse element_response(const ElementGeometry& geo, const Vector6& u, double modulus,
                                 double gamma, const MaterialParams& material);

/// Partial derivatives of the internal force with respect to gamma (at
/// fixed E) and to E (at fixed gamma). Used by design sensitivities.
struct ElementForcePartials {
    Vector6 force;
    Vector6 dgamma;
    Vector6 dmodulus;
};
ElementForcePartials element_force_partials(const ElementGeometry& geo, const Vector6& u,
                                            double modulus, double gamma,
                                            const MaterialParams& material);

/// Linear small-strain stiffness E V B^T D0 B.
Matrix6 linear_stiffness(const ElementGeometry& geo, double modulus, const MaterialParams& material);

}  // namespace varibc
