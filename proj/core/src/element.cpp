#include "varibc/element.hpp"

#include "varibc/errors.hpp"

namespace varibc {

namespace {

using Matrix36 = Eigen::Matrix<double, 3, 6>;

Matrix2 displacement_gradient(const ShapeGradients& g, const Vector6& u) {
    Matrix2 H = Matrix2::Zero();
    for (int a = 0; a < 3; ++a)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) H(i, j) += u(2 * a + i) * g(j, a);
    return H;
}

Matrix36 linear_b(const ShapeGradients& g) {
    Matrix36 B = Matrix36::Zero();
    for (int a = 0; a < 3; ++a) {
        B(0, 2 * a) = g(0, a);
        B(1, 2 * a + 1) = g(1, a);
        B(2, 2 * a) = g(1, a);
        B(2, 2 * a + 1) = g(0, a);
    }
    return B;
}

// Variation of the Green strain (Voigt, engineering shear) at deformation F.
Matrix36 nonlinear_b(const ShapeGradients& g, const Matrix2& F) {
    Matrix36 B;
    for (int a = 0; a < 3; ++a) {
        const double gx = g(0, a), gy = g(1, a);
        B(0, 2 * a) = F(0, 0) * gx;
        B(0, 2 * a + 1) = F(1, 0) * gx;
        B(1, 2 * a) = F(0, 1) * gy;
        B(1, 2 * a + 1) = F(1, 1) * gy;
        B(2, 2 * a) = F(0, 0) * gy + F(0, 1) * gx;
        B(2, 2 * a + 1) = F(1, 0) * gy + F(1, 1) * gx;
    }
    return B;
}

struct NonlinearPart {
    Vector6 force;   // per unit modulus and volume
    Matrix6 tangent;
};

DeformationState checked_state(const ElementGeometry& geo, const Vector6& u, double gamma) {
    const Matrix2 F = Matrix2::Identity() + gamma * displacement_gradient(geo.grad, u);
    DeformationState s(F);
    if (!(s.J > 0.0)) throw NonPositiveJacobian(geo.id, s.J);
    return s;
}

NonlinearPart nonlinear_part(const ElementGeometry& geo, const DeformationState& s,
                             const MaterialParams& material, bool with_tangent) {
    NonlinearPart out;
    const Matrix2 S = pk2_stress(s, material);
    const Matrix36 BN = nonlinear_b(geo.grad, s.F);
    out.force = BN.transpose() * Vector3(S(0, 0), S(1, 1), S(0, 1));
    if (with_tangent) {
        const Matrix3 D = tangent_moduli(s, material);
        out.tangent = BN.transpose() * D * BN;
        const Eigen::Matrix<double, 3, 2> gt = geo.grad.transpose();
        const Matrix3 G = gt * S * geo.grad;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                out.tangent(2 * a, 2 * b) += G(a, b);
                out.tangent(2 * a + 1, 2 * b + 1) += G(a, b);
            }
    }
    return out;
}

}  // namespace

Matrix6 linear_stiffness(const ElementGeometry& geo, double modulus, const MaterialParams& material) {
    const Matrix36 B = linear_b(geo.grad);
    return modulus * geo.volume * (B.transpose() * material.D0 * B);
}

double element_energy(const ElementGeometry& geo, const Vector6& u, double modulus, double gamma,
                      const MaterialParams& material) {
    const DeformationState s = checked_state(geo, u, gamma);
    const Vector3 eps = linear_b(geo.grad) * u;
    const double lin = 0.5 * eps.dot(material.D0 * eps);
    return modulus * geo.volume * (strain_energy(s, material) + (1.0 - gamma * gamma) * lin);
}

Vector6 element_internal_force(const ElementGeometry& geo, const Vector6& u, double modulus,
                               double gamma, const MaterialParams& material) {
    const DeformationState s = checked_state(geo, u, gamma);
    const NonlinearPart nl = nonlinear_part(geo, s, material, false);
    const Matrix6 kl = linear_stiffness(geo, modulus, material);
    return gamma * modulus * geo.volume * nl.force + (1.0 - gamma * gamma) * (kl * u);
}

Matrix6 element_tangent(const ElementGeometry& geo, const Vector6& u, double modulus, double gamma,
                        const MaterialParams& material) {
    return element_response(geo, u, modulus, gamma, material).tangent;
}

ElementResponse element_response(const ElementGeometry& geo, const Vector6& u, double modulus,
                                 double gamma, const MaterialParams& material) {
    const DeformationState s = checked_state(geo, u, gamma);
    const NonlinearPart nl = nonlinear_part(geo, s, material, true);
    const Matrix6 kl = linear_stiffness(geo, modulus, material);
    const double ev = modulus * geo.volume;
    const double g2 = gamma * gamma;
    ElementResponse r;
    r.force = gamma * ev * nl.force + (1.0 - g2) * (kl * u);
    r.tangent = g2 * ev * nl.tangent + (1.0 - g2) * kl;
    return r;
}

ElementForcePartials element_force_partials(const ElementGeometry& geo, const Vector6& u,
                                            double modulus, double gamma,
                                            const MaterialParams& material) {
    const DeformationState s = checked_state(geo, u, gamma);
    const NonlinearPart nl = nonlinear_part(geo, s, material, true);
    const Matrix36 B = linear_b(geo.grad);
    const Vector6 fl = geo.volume * (B.transpose() * (material.D0 * (B * u)));  // per unit modulus
    const Vector6 fn = geo.volume * nl.force;
    const Vector6 kn_u = geo.volume * (nl.tangent * u);

    ElementForcePartials p;
    const Vector6 unit = gamma * fn + (1.0 - gamma * gamma) * fl;
    p.force = modulus * unit;
    p.dmodulus = unit;
    // d/dgamma [gamma f_NL(gamma u)] = f_NL + gamma K_NL u
    p.dgamma = modulus * (fn + gamma * kn_u - 2.0 * gamma * fl);
    return p;
}

}  // namespace varibc
