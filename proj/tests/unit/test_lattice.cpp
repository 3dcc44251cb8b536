#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "magbern/lattice/eigensolve.hpp"
#include "magbern/lattice/translate.hpp"

using namespace magbern;
using namespace magbern::lattice;

namespace {

constexpr double pi = std::numbers::pi;

Eigen::VectorXd all_eigenvalues(const MagneticOperator& op) {
    return eigensolve(op, Cutoff::by_count(op.setup.size())).values;
}

}  // namespace

TEST(Torus, FluxRules) {
    const auto s = TorusSetup::square(1.0, 3);
    EXPECT_NEAR(s.flux_quanta(), 3.0, 1e-12);
    EXPECT_EQ(s.nphi(), 3);
    const auto r = flux_report(s);
    EXPECT_TRUE(r.product_ok);
    EXPECT_TRUE(r.difference_ok);  // L1 = L2

    TorusSetup bad{4.0, 4.0, 1.0, 8, 8};
    EXPECT_FALSE(flux_report(bad).product_ok);
    EXPECT_THROW(assemble(bad), ValidationError);

    // Difference rule holds, product rule fails: still rejected.
    TorusSetup diff{1.0, 1.0 + 2 * pi, 1.0, 8, 8};
    EXPECT_TRUE(flux_report(diff).difference_ok);
    EXPECT_FALSE(flux_report(diff).product_ok);
    EXPECT_THROW(assemble(diff, std::nullopt, FluxRule::difference), ValidationError);
}

TEST(Torus, HermitianAndPlaquettes) {
    TorusSetup s{4.0, 2 * pi, 1.0, 12, 10};
    const auto op = assemble(s);
    EXPECT_LT(hermiticity_defect(op), 1e-14);
    EXPECT_LT(plaquette_defect(op), 1e-12);
}

TEST(Torus, ZeroFieldIsDiscreteLaplacian) {
    TorusSetup s{3.0, 2.0, 0.0, 6, 5};
    std::vector<double> want;
    for (int k1 = 0; k1 < s.N1; ++k1)
        for (int k2 = 0; k2 < s.N2; ++k2) {
            const double a = 2 * std::sin(pi * k1 / s.N1) / s.h1();
            const double b = 2 * std::sin(pi * k2 / s.N2) / s.h2();
            want.push_back(a * a + b * b);
        }
    std::sort(want.begin(), want.end());
    const auto got = all_eigenvalues(assemble(s));
    ASSERT_EQ(got.size(), static_cast<long>(want.size()));
    for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got(static_cast<long>(i)), want[i], 1e-10);
}

TEST(Torus, ConstantPotentialShifts) {
    const auto s = TorusSetup::square(1.0, 2, 4.0);
    const auto a = all_eigenvalues(assemble(s));
    const auto b = all_eigenvalues(assemble(s, std::vector<double>(static_cast<std::size_t>(s.size()), 0.75)));
    EXPECT_LT((b - a - Eigen::VectorXd::Constant(a.size(), 0.75)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Spectrum, LowestClusterNearLandauLevel) {
    for (int nphi : {1, 2, 4}) {
        const double B = 1.0;
        const auto s = TorusSetup::square(B, nphi, 8.0);
        const auto sub = eigensolve(assemble(s), Cutoff::by_count(nphi + 1));
        for (int k = 0; k < nphi; ++k) EXPECT_NEAR(sub.values(k), B, 0.02 * B) << nphi;
        // The next state sits near 3B.
        EXPECT_NEAR(sub.values(nphi), 3 * B, 0.1 * B) << nphi;
        EXPECT_LT(sub.values(nphi - 1) - sub.values(0), 1e-3);
    }
}

TEST(Spectrum, ClusterSizeByEnergy) {
    const auto s = TorusSetup::square(1.0, 3, 8.0);
    EXPECT_EQ(eigensolve(assemble(s), Cutoff::by_energy(2.0)).size(), 3);
    EXPECT_EQ(eigensolve(assemble(s), Cutoff::by_energy(4.0)).size(), 6);
}

TEST(Spectrum, DenseAndIterativeAgree) {
    const auto s = TorusSetup::square(1.0, 3, 8.0);
    const auto op = assemble(s);
    const auto dense = eigensolve(op, Cutoff::by_energy(4.0));
    EigenOptions it;
    it.force_iterative = true;
    const auto iter = eigensolve(op, Cutoff::by_energy(4.0), it);
    ASSERT_EQ(dense.size(), iter.size());
    EXPECT_LT((dense.values - iter.values).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT(iter.orthonormality_error, 1e-10);
    EXPECT_LT(iter.max_residual, 1e-9);
    // Same subspace: projector difference.
    const Eigen::MatrixXcd P = dense.vectors * dense.vectors.adjoint();
    const Eigen::MatrixXcd Q = iter.vectors * iter.vectors.adjoint();
    EXPECT_LT((P - Q).norm(), 1e-7);
}

TEST(Spectrum, InertiaCountMatchesDense) {
    const auto s = TorusSetup::square(0.8, 2, 6.0);
    const auto op = assemble(s);
    const auto ev = all_eigenvalues(op);
    for (double e : {0.5, 1.0, 2.0, 3.0, 7.5}) {
        const int dense = static_cast<int>((ev.array() < e).count());
        EXPECT_EQ(detail::count_below(op.H, e), dense) << e;
    }
}

TEST(Spectrum, BandLimitEnforced) {
    const auto s = TorusSetup::square(1.0, 1, 4.0);
    const double hmax = std::max(s.h1(), s.h2());
    EXPECT_THROW(eigensolve(assemble(s), Cutoff::by_energy(0.2 / (hmax * hmax))), ValidationError);
}

TEST(Translate, AllowedShiftsCommuteWithH) {
    // nphi = 4 on a 16x16 grid: shifts by L/4 satisfy both conditions.
    const auto s0 = TorusSetup::square(1.0, 4, 3.0);
    TorusSetup s = s0;
    s.N1 = s.N2 = 16;
    const auto op = assemble(s);
    for (LatticeShift y : {LatticeShift{4, 0}, LatticeShift{0, 4}, LatticeShift{8, 12}}) {
        ASSERT_TRUE(translation_allowed(s, y));
        EXPECT_LT(commutation_check(op, y), 1e-13);
    }
    EXPECT_FALSE(translation_allowed(s, {1, 0}));
    EXPECT_THROW(commutation_check(op, {1, 0}), ValidationError);
}

TEST(Translate, CommutationPhase) {
    TorusSetup s = TorusSetup::square(1.0, 4, 3.0);
    s.N1 = s.N2 = 16;
    // phase B y1 y2' = 2π nphi (1/4)(1/4) = π/2: not trivial.
    EXPECT_FALSE(translations_commute(s, {4, 0}, {0, 4}));
    EXPECT_TRUE(translations_commute(s, {8, 0}, {0, 8}));
    EXPECT_TRUE(translations_commute(s, {4, 0}, {8, 0}));
}

TEST(Translate, UnitaryAndComposes) {
    TorusSetup s = TorusSetup::square(1.0, 4, 3.0);
    s.N1 = s.N2 = 16;
    SplitStream rng(3);
    Eigen::VectorXcd psi(s.size());
    for (int i = 0; i < psi.size(); ++i) psi(i) = cplx(rng.normal(), rng.normal());
    const auto a = magnetic_translate(s, psi, {4, 0});
    EXPECT_NEAR(a.norm(), psi.norm(), 1e-12);
    // Commuting pair: Γ_a Γ_b = Γ_b Γ_a.
    const auto ab = magnetic_translate(s, magnetic_translate(s, psi, {8, 0}), {0, 8});
    const auto ba = magnetic_translate(s, magnetic_translate(s, psi, {0, 8}), {8, 0});
    EXPECT_LT((ab - ba).norm(), 1e-11 * psi.norm());
}

TEST(Translate, MapsEigenspaceToItself) {
    TorusSetup s = TorusSetup::square(1.0, 4, 3.0);
    s.N1 = s.N2 = 16;
    const auto sub = eigensolve(assemble(s), Cutoff::by_count(4));
    const Eigen::MatrixXcd P = sub.vectors * sub.vectors.adjoint();
    const Eigen::VectorXcd v = sub.vectors.col(0);
    const Eigen::VectorXcd w = magnetic_translate(s, v, {4, 0});
    EXPECT_LT((P * w - w).norm(), 1e-9);
}
