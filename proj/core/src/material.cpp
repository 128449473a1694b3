#include "varibc/material.hpp"

#include "varibc/errors.hpp"

#include <Eigen/LU>

#include <cmath>

namespace varibc {

LameParameters lame_parameters(double nu) {
    if (!(nu >= 0.0 && nu < 0.5)) throw Error("Poisson ratio must lie in [0, 0.5)");
    const double mu = 1.0 / (2.0 * (1.0 + nu));
    const double lambda3d = nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    const double lambda = 2.0 * lambda3d * mu / (lambda3d + 2.0 * mu);
    return {lambda, mu};
}

Matrix3 plane_stress_hooke(double nu) {
    Matrix3 D;
    const double c = 1.0 / (1.0 - nu * nu);
    D << c, c * nu, 0.0,
         c * nu, c, 0.0,
         0.0, 0.0, c * (1.0 - nu) / 2.0;
    return D;
}

MaterialParams MaterialParams::from_poisson(double nu, NeoHookeanVariant variant) {
    MaterialParams p;
    const auto [l, m] = lame_parameters(nu);
    p.nu = nu;
    p.lambda0 = l;
    p.mu0 = m;
    p.D0 = plane_stress_hooke(nu);
    p.variant = variant;
    return p;
}

DeformationState::DeformationState(const Matrix2& F_) : F(F_), C(F_.transpose() * F_), J(F_.determinant()) {}

double strain_energy(const DeformationState& s, const MaterialParams& p) {
    if (!(s.J > 0.0)) throw NonPositiveJacobian(-1, s.J);
    return 0.5 * p.mu0 * (s.C.trace() - 2.0) - p.mu0 * std::log(s.J) +
           0.5 * p.lambda0 * (s.J - 1.0) * (s.J - 1.0);
}

namespace {

// coefficient of C^-1 in the volumetric part of S
double volumetric(double J, const MaterialParams& p) {
    return p.variant == NeoHookeanVariant::consistent ? p.lambda0 * (J * J - J)
                                                      : p.lambda0 * (2.0 * J * J - J);
}

}  // namespace

Matrix2 pk2_stress(const DeformationState& s, const MaterialParams& p) {
    if (!(s.J > 0.0)) throw NonPositiveJacobian(-1, s.J);
    const Matrix2 Ci = s.C.inverse();
    return volumetric(s.J, p) * Ci + p.mu0 * (Matrix2::Identity() - Ci);
}

double tangent_component(const DeformationState& s, const MaterialParams& p, int i, int j, int k, int l) {
    if (!(s.J > 0.0)) throw NonPositiveJacobian(-1, s.J);
    const Matrix2 Ci = s.C.inverse();
    const double a = p.lambda0 * (2.0 * s.J * s.J - s.J);
    const double b = p.mu0 - volumetric(s.J, p);
    return a * Ci(i, j) * Ci(k, l) + b * (Ci(i, k) * Ci(j, l) + Ci(i, l) * Ci(j, k));
}

Matrix3 tangent_moduli(const DeformationState& s, const MaterialParams& p) {
    static constexpr int voigt[3][2] = {{0, 0}, {1, 1}, {0, 1}};
    Matrix3 D;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            D(a, b) = tangent_component(s, p, voigt[a][0], voigt[a][1], voigt[b][0], voigt[b][1]);
    return D;
}

}  // namespace varibc
