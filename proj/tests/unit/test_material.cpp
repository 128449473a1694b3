#include "varibc/errors.hpp"
#include "varibc/material.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <random>

using namespace varibc;

namespace {

// Deformation state whose right Cauchy-Green tensor is exactly C.
DeformationState state_from_C(const Matrix2& C) {
    const Eigen::SelfAdjointEigenSolver<Matrix2> es(C);
    const Matrix2 F = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    return DeformationState(F);
}

Matrix2 random_F(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-0.35, 0.35), j(0.5, 2.0);
    while (true) {
        Matrix2 F;
        F << 1 + u(rng), u(rng), u(rng), 1 + u(rng);
        if (F.determinant() < 0.05) continue;
        return F * std::sqrt(j(rng) / F.determinant());
    }
}

Matrix2 unit_dC(int k) {
    Matrix2 d = Matrix2::Zero();
    if (k < 2) d(k, k) = 1.0;
    else d(0, 1) = d(1, 0) = 0.5;
    return d;
}

}  // namespace

TEST(Lame, PoissonZero) {
    const LameParameters l = lame_parameters(0.0);
    EXPECT_DOUBLE_EQ(l.mu0, 0.5);
    EXPECT_DOUBLE_EQ(l.lambda0, 0.0);
}

TEST(Lame, PlaneStressValuesAtPointThree) {
    const LameParameters l = lame_parameters(0.3);
    EXPECT_NEAR(l.mu0, 0.384615, 1e-6);
    // plane-stress effective lambda: lambda0 + 2 mu0 = 1 / (1 - nu^2)
    EXPECT_NEAR(l.lambda0, 0.3 / (1.0 - 0.09), 1e-12);
    EXPECT_NEAR(l.lambda0 + 2.0 * l.mu0, 1.0 / 0.91, 1e-12);
}

TEST(Lame, HookeDiagonalNearIncompressible) {
    EXPECT_NEAR(plane_stress_hooke(0.49)(0, 0), 1.0 / (1.0 - 0.49 * 0.49), 1e-14);
    EXPECT_NEAR(plane_stress_hooke(0.49)(2, 2), 1.0 / (2.0 * 1.49), 1e-15);
}

TEST(NeoHookean, StressFreeReference) {
    const MaterialParams mp = MaterialParams::from_poisson(0.49);
    const DeformationState I(Matrix2::Identity());
    EXPECT_EQ(pk2_stress(I, mp).norm(), 0.0);
    EXPECT_EQ(strain_energy(I, mp), 0.0);
}

TEST(NeoHookean, ReferenceTangentIsHooke) {
    for (double nu : {0.0, 0.3, 0.49}) {
        const MaterialParams mp = MaterialParams::from_poisson(nu);
        const Matrix3 D = tangent_moduli(DeformationState(Matrix2::Identity()), mp);
        const LameParameters l = lame_parameters(nu);
        Matrix3 expected;
        expected << l.lambda0 + 2 * l.mu0, l.lambda0, 0, l.lambda0, l.lambda0 + 2 * l.mu0, 0, 0, 0, l.mu0;
        EXPECT_LE((D - expected).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LE((D - plane_stress_hooke(nu)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(NeoHookean, StressIsEnergyDerivative) {
    const MaterialParams mp = MaterialParams::from_poisson(0.49);
    std::mt19937 rng(21);
    const double h = 1e-6;
    for (int t = 0; t < 30; ++t) {
        const DeformationState st(random_F(rng));
        const Matrix2 S = pk2_stress(st, mp);
        Matrix2 fd;
        for (int k = 0; k < 3; ++k) {
            const double dpsi = (strain_energy(state_from_C(st.C + h * unit_dC(k)), mp) -
                                 strain_energy(state_from_C(st.C - h * unit_dC(k)), mp)) / (2 * h);
            // the shear perturbation moves C12 and C21 by h/2 each
            if (k < 2) fd(k, k) = 2.0 * dpsi;
            else fd(0, 1) = fd(1, 0) = 2.0 * dpsi;
        }
        EXPECT_LE((fd - S).norm() / S.norm(), 1e-7);
    }
}

TEST(NeoHookean, TangentIsStressDerivativeAndSymmetric) {
    const MaterialParams mp = MaterialParams::from_poisson(0.45);
    std::mt19937 rng(4);
    const double h = 1e-6;
    for (int t = 0; t < 30; ++t) {
        const DeformationState st(random_F(rng));
        const Matrix3 D = tangent_moduli(st, mp);
        Matrix3 fd;
        for (int k = 0; k < 3; ++k) {
            const Matrix2 dS = (pk2_stress(state_from_C(st.C + h * unit_dC(k)), mp) -
                                pk2_stress(state_from_C(st.C - h * unit_dC(k)), mp)) / (2 * h);
            fd.col(k) = 2.0 * Vector3(dS(0, 0), dS(1, 1), dS(0, 1));
        }
        EXPECT_LE((fd - D).norm() / D.norm(), 1e-6);
        EXPECT_LE((D - D.transpose()).cwiseAbs().maxCoeff(), 1e-14 * D.norm());
        EXPECT_DOUBLE_EQ(tangent_component(st, mp, 0, 1, 1, 0), tangent_component(st, mp, 1, 0, 0, 1));
    }
}

TEST(NeoHookean, SmallStrainLimitMatchesHooke) {
    const MaterialParams mp = MaterialParams::from_poisson(0.49);
    Matrix2 F = Matrix2::Identity();
    F(0, 0) = 1.001;
    const Matrix2 S = pk2_stress(DeformationState(F), mp);
    const Vector3 lin = mp.D0 * Vector3(1e-3, 0.0, 0.0);
    EXPECT_LE(std::abs(S(0, 0) - lin[0]) / std::abs(lin[0]), 5e-3);
    EXPECT_LE(std::abs(S(1, 1) - lin[1]) / std::abs(lin[1]), 5e-3);
}

TEST(NeoHookean, InvertedStateThrows) {
    const MaterialParams mp = MaterialParams::from_poisson(0.3);
    Matrix2 F = Matrix2::Identity();
    F(0, 0) = -0.5;
    EXPECT_THROW(pk2_stress(DeformationState(F), mp), NonPositiveJacobian);
}

TEST(NeoHookean, PrintedVariantCarriesReferenceStress) {
    const MaterialParams mp = MaterialParams::from_poisson(0.3, NeoHookeanVariant::printed);
    EXPECT_GT(pk2_stress(DeformationState(Matrix2::Identity()), mp).norm(), 0.0);
}
