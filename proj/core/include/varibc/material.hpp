#pragma once

#include <Eigen/Core>

namespace varibc {

using Matrix2 = Eigen::Matrix2d;
using Matrix3 = Eigen::Matrix3d;
using Vector3 = Eigen::Vector3d;

/// Which volumetric coefficients the modified Neo-Hookean law uses.
///
/// `consistent` derives S and D from the stored energy
///   psi = mu0/2 (tr C - 2) - mu0 ln J + lambda0/2 (J - 1)^2
/// so that S(I) = 0 and D = 2 dS/dC. `printed` keeps the alternative
/// coefficient lambda0 (2J^2 - J) in the stress for comparison runs only;
/// it is not an energy derivative and carries residual stress at F = I.
enum class NeoHookeanVariant { consistent, printed };

/// Plane-stress Lame parameters for a unit Young's modulus.
struct MaterialParams {
    double nu = 0.49;
    double lambda0 = 0.0;
    double mu0 = 0.0;
    Matrix3 D0 = Matrix3::Zero();  // Voigt [11, 22, 12] with engineering shear
    NeoHookeanVariant variant = NeoHookeanVariant::consistent;

    static MaterialParams from_poisson(double nu,
                                       NeoHookeanVariant variant = NeoHookeanVariant::consistent);
};

struct LameParameters {
    double lambda0;
    double mu0;
};

/// mu0 = 1/(2(1+nu)); lambda0 is the plane-stress effective value
/// 2 lambda mu / (lambda + 2 mu), so the small-strain tangent equals the
/// plane-stress Hooke matrix.
LameParameters lame_parameters(double nu);

/// Plane-stress Hooke matrix for unit modulus.
Matrix3 plane_stress_hooke(double nu);

struct DeformationState {
    Matrix2 F;
    Matrix2 C;
    double J;

    explicit DeformationState(const Matrix2& F);
};

/// Strain energy density per unit modulus.
double strain_energy(const DeformationState& state, const MaterialParams& params);

/// Second Piola-Kirchhoff stress per unit modulus. Throws NonPositiveJacobian.
Matrix2 pk2_stress(const DeformationState& state, const MaterialParams& params);

/// Material tangent D = 2 dS/dC in Voigt form per unit modulus.
Matrix3 tangent_moduli(const DeformationState& state, const MaterialParams& params);

/// Full fourth-order component D_ijkl (0-based indices).
double tangent_component(const DeformationState& state, const MaterialParams& params, int i, int j,
                         int k, int l);

}  // namespace varibc
