#include <gtest/gtest.h>

#include <cmath>

#include "magbern/control/heat.hpp"
#include "magbern/geometry/mask.hpp"
#include "magbern/lattice/eigensolve.hpp"

using namespace magbern;
using namespace magbern::control;

namespace {

struct Fixture {
    lattice::SpectralSubspace sub;
    geometry::SetMask mask;
};

Fixture make(int nphi, double e_max, int width = 4, int period = 10) {
    const auto s = lattice::TorusSetup::square(1.0, nphi, 8.0);
    auto sub = lattice::eigensolve(lattice::assemble(s), lattice::Cutoff::by_energy(e_max));
    auto mask = geometry::strip_mask(s.N1, s.N2, s.h1(), s.h2(), width, period);
    return {std::move(sub), std::move(mask)};
}

Eigen::VectorXcd random_unit(int n, std::uint64_t seed) {
    SplitStream rng(seed);
    Eigen::VectorXcd v(n);
    for (int k = 0; k < n; ++k) v(k) = cplx(rng.normal(), rng.normal());
    return v / v.norm();
}

// RK4 for u' = -Λu + M q(t), q(t) = e^{-(T-t)Λ} p.
Eigen::VectorXcd simulate(const lattice::SpectralSubspace& sub, const Eigen::MatrixXcd& M, const Eigen::VectorXcd& u0,
                          const Eigen::VectorXcd& p, double T, int steps) {
    auto rhs = [&](double t, const Eigen::VectorXcd& u) {
        Eigen::VectorXcd q(u.size());
        for (int k = 0; k < u.size(); ++k) q(k) = std::exp(-sub.values(k) * (T - t)) * p(k);
        Eigen::VectorXcd du = M * q;
        for (int k = 0; k < u.size(); ++k) du(k) -= sub.values(k) * u(k);
        return du;
    };
    Eigen::VectorXcd u = u0;
    const double dt = T / steps;
    for (int i = 0; i < steps; ++i) {
        const double t = i * dt;
        const Eigen::VectorXcd k1 = rhs(t, u);
        const Eigen::VectorXcd k2 = rhs(t + dt / 2, u + dt / 2 * k1);
        const Eigen::VectorXcd k3 = rhs(t + dt / 2, u + dt / 2 * k2);
        const Eigen::VectorXcd k4 = rhs(t + dt, u + dt * k3);
        u += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return u;
}

}  // namespace

TEST(Gramian, QuadratureMatchesClosedForm) {
    const auto fx = make(2, 4.0);
    const auto M = masked_form(fx.sub, fx.mask);
    for (double T : {0.1, 1.0, 3.0}) {
        const auto G = gramian(fx.sub, M, T, 64);
        const auto X = gramian_exact(fx.sub, M, T);
        EXPECT_LT((G - X).norm(), 1e-12 * X.norm()) << T;
        EXPECT_LT((G - G.adjoint()).norm(), 1e-14 * G.norm());
    }
}

TEST(Control, OneModeClosedForm) {
    const auto fx = make(1, 2.0);
    ASSERT_EQ(fx.sub.size(), 1);
    const double lam = fx.sub.values(0);
    const double m = masked_form(fx.sub, fx.mask)(0, 0).real();
    for (double T : {0.5, 2.0}) {
        const double g = m * (1 - std::exp(-2 * lam * T)) / (2 * lam);
        const double want = std::exp(-2 * lam * T) / g;
        EXPECT_NEAR(control_cost_squared(fx.sub, fx.mask, T), want, 1e-10 * want);
        HeatProblem p{&fx.sub, &fx.mask, T, Eigen::VectorXcd::Ones(1)};
        const auto r = hum_control(p);
        EXPECT_NEAR(r.cost * r.cost, want, 1e-10 * want);
        EXPECT_NEAR(observability_quotient(p), want, 1e-10 * want);
    }
}

TEST(Control, HumDrivesStateToZero) {
    const auto fx = make(3, 4.0);
    const auto M = masked_form(fx.sub, fx.mask);
    const auto u0 = random_unit(fx.sub.size(), 9);
    const double T = 1.0;
    HeatProblem p{&fx.sub, &fx.mask, T, u0};
    const auto r = hum_control(p);
    EXPECT_LT(r.terminal_residual, 1e-10);
    EXPECT_NEAR(r.cost * r.cost, r.gramian_energy, 1e-9 * r.gramian_energy);
    const auto uT = simulate(fx.sub, M, u0, r.adjoint, T, 4000);
    EXPECT_LT(uT.norm(), 1e-9);
    // Without control the state does not vanish.
    EXPECT_GT(propagate(fx.sub, u0, T).norm(), 1e-3);
}

TEST(Control, ZeroInitialStateCostsNothing) {
    const auto fx = make(2, 4.0);
    HeatProblem p{&fx.sub, &fx.mask, 1.0, Eigen::VectorXcd::Zero(fx.sub.size())};
    const auto r = hum_control(p);
    EXPECT_EQ(r.cost, 0.0);
    EXPECT_EQ(r.adjoint.norm(), 0.0);
}

TEST(Control, DualityWithObservability) {
    // Worst-case cost^2 equals the sup of the observability quotient.
    const auto fx = make(3, 4.0);
    const double T = 0.7;
    const double worst = control_cost_squared(fx.sub, fx.mask, T);
    double best_q = 0.0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto u0 = random_unit(fx.sub.size(), seed);
        HeatProblem p{&fx.sub, &fx.mask, T, u0};
        const double q = observability_quotient(p);
        best_q = std::max(best_q, q);
        EXPECT_LE(q, worst * (1 + 1e-9));
        const auto r = hum_control(p);
        EXPECT_LE(r.cost * r.cost, worst * (1 + 1e-9));
    }
    EXPECT_GT(best_q, 0.2 * worst);
}

TEST(Control, CostDecreasesWithHorizonAndLargerSet) {
    const auto fx = make(3, 4.0, 4, 10);
    double prev = INFINITY;
    for (double T : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double c = control_cost_squared(fx.sub, fx.mask, T);
        EXPECT_LT(c, prev);
        prev = c;
    }
    const auto wide = geometry::strip_mask(fx.mask.n1(), fx.mask.n2(), fx.mask.h1(), fx.mask.h2(), 6, 10);
    ASSERT_TRUE(fx.mask.subset_of(wide));
    EXPECT_LT(control_cost_squared(fx.sub, wide, 1.0), control_cost_squared(fx.sub, fx.mask, 1.0));
}

TEST(Control, MissingSetIsReported) {
    const auto fx = make(1, 2.0);
    const geometry::SetMask none(fx.mask.n1(), fx.mask.n2(), fx.mask.h1(), fx.mask.h2());
    HeatProblem p{&fx.sub, &none, 1.0, Eigen::VectorXcd::Ones(1)};
    EXPECT_THROW(hum_control(p), GramianError);
    EXPECT_THROW(observability_quotient(p), NumericalError);
}

TEST(Bounds, TracedSplitReproducesSpectralConstant) {
    for (double E : {1.0, 3.0, 9.0})
        for (double l : {0.0, 0.5, 2.0}) {
            const auto s = traced_split(0.3, l, 1.0);
            const double log_c = s.d0.log + s.d1 * std::sqrt(E);
            EXPECT_NEAR(log_c, inequality::theoretical_constant(E, 1.0, l, 0.3).log, 1e-9 * std::abs(log_c));
        }
}

TEST(Bounds, AbstractCostFormula) {
    const auto v = abstract_cost(Magnitude::from_value(2.0), 1.5, 0.5, 1.0);
    EXPECT_NEAR(v.log, std::log(2.0 / 0.5 * 5.0) + 1.5 * 1.5 / 0.5, 1e-12);
}

TEST(Bounds, StructuralCostFormula) {
    const auto c = inequality::ThmConstants::structural(2.0, 1.0, 1.0, 1.0);
    const auto v = cost_bound(0.5, 1.0, 1.0, 2.0, c);
    // C = 2: 2/(2 · 0.5^(2+2)) · exp(ln 4 · 2 / 2 - 2).
    EXPECT_NEAR(v.log, std::log(16.0) + std::log(4.0) - 2.0, 1e-12);
}

TEST(Bounds, TracedBoundDominatesHum) {
    const auto fx = make(2, 3.0);
    for (double T : {0.5, 1.0, 4.0}) {
        const double c = control_cost_squared(fx.sub, fx.mask, T);
        EXPECT_LE(Magnitude::from_value(c), cost_bound(0.2, 8.0, 1.0, T));
    }
}

TEST(Observability, QuotientGrowsWithHoleAroundGroundState) {
    const double B = 1.0;
    const auto box = lattice::TorusSetup::square(B, 6, 8.0);
    const auto low = lattice::eigensolve(lattice::assemble(box), lattice::Cutoff::by_energy(2.0 * B));
    const double y1 = box.L1 / 2;
    const double y2 = box.L2 / 2;
    Eigen::VectorXcd g(box.size());
    for (int i1 = 0; i1 < box.N1; ++i1)
        for (int i2 = 0; i2 < box.N2; ++i2) {
            const double x1 = i1 * box.h1();
            const double x2 = i2 * box.h2();
            const double r2 = (x1 - y1) * (x1 - y1) + (x2 - y2) * (x2 - y2);
            g(box.index(i1, i2)) = std::exp(-0.25 * B * r2) * std::polar(1.0, 0.5 * B * (x1 * x2 - x1 * y2 + x2 * y1));
        }
    g /= g.norm();
    Eigen::VectorXcd u0 = low.vectors.adjoint() * g;
    ASSERT_GT(u0.norm(), 0.99);
    u0 /= u0.norm();
    double prev = 0.0;
    for (double r : {0.7, 1.4, 2.1, 2.8}) {
        const auto hole = geometry::disk_complement_mask(box.N1, box.N2, box.h1(), box.h2(), y1, y2, r, 0.0, 0.0, true);
        const double q = observability_quotient({&low, &hole, 1.0, u0});
        EXPECT_GT(q, prev);
        prev = q;
    }
    EXPECT_GT(prev, 10.0);
}
