#include <gtest/gtest.h>

#include <numbers>

#include "magbern/random/wegner.hpp"

using namespace magbern;
using namespace magbern::random;

namespace {

constexpr double quarter_pi = std::numbers::pi / 4;

EnsembleConfig small_config(double m0 = 0.0, double M0 = 4.0) {
    EnsembleConfig c;
    c.setup = {4.0, 4.0, quarter_pi, 16, 16};
    c.law = {m0, M0};
    return c;
}

}  // namespace

TEST(Law, ModulusOfContinuity) {
    EXPECT_DOUBLE_EQ(modulus_of_continuity({0.0, 4.0}, 0.1), 0.025);
    EXPECT_DOUBLE_EQ(modulus_of_continuity({-1.0, 1.0}, 0.5), 0.25);
    EXPECT_DOUBLE_EQ(modulus_of_continuity({0.0, 1.0}, 3.0), 1.0);
    EXPECT_THROW(modulus_of_continuity({0.0, 1.0}, 0.0), ValidationError);
    EXPECT_THROW(modulus_of_continuity({1.0, 1.0}, 0.1), ValidationError);
}

TEST(Cantor, RemovedIntervals) {
    EXPECT_TRUE(fat_cantor_contains(0.3, 1));
    EXPECT_FALSE(fat_cantor_contains(0.5, 1));
    EXPECT_FALSE(fat_cantor_contains(0.4, 1));  // inside (3/8, 5/8)
    EXPECT_TRUE(fat_cantor_contains(0.37, 1));
    EXPECT_FALSE(fat_cantor_contains(-0.1, 0));
    EXPECT_TRUE(fat_cantor_contains(0.5, 0));
}

TEST(Cantor, MeasureMatchesRemovedLength) {
    for (int depth = 1; depth <= 5; ++depth) {
        double removed = 0.0;
        for (int k = 1; k <= depth; ++k) removed += std::pow(2.0, k - 1) * std::pow(4.0, -k);
        const int n = 1 << 20;
        int in = 0;
        for (int i = 0; i < n; ++i) in += fat_cantor_contains((i + 0.5) / n, depth) ? 1 : 0;
        EXPECT_NEAR(static_cast<double>(in) / n, 1.0 - removed, 1e-5) << depth;
    }
}

TEST(Ensemble, SupportIsThickAndPeriodic) {
    const auto c = small_config();
    EXPECT_NO_THROW(c.validate());
    const auto s = c.support();
    EXPECT_TRUE(s.periodic());
    EXPECT_GT(s.count(), 0);
    EXPECT_LT(s.count(), s.n1() * s.n2());
    // Same pattern in every unit cell: 4 nodes per unit length.
    for (int i1 = 0; i1 < 16; ++i1)
        for (int i2 = 0; i2 < 16; ++i2) EXPECT_EQ(s.at(i1, i2), s.at((i1 + 4) % 16, (i2 + 8) % 16));
}

TEST(Ensemble, Validation) {
    auto c = small_config();
    c.setup = {4.5, 4.5, 2 * std::numbers::pi / (4.5 * 4.5), 18, 18};
    EXPECT_THROW(c.validate(), ValidationError);
    auto thin = small_config();
    thin.profile.radius = 0.01;
    EXPECT_THROW(thin.validate(), ValidationError);
    auto flux = small_config();
    flux.setup.B = 1.0;
    EXPECT_THROW(flux.validate(), ValidationError);
}

TEST(Ensemble, CouplingsDeterministicAndInRange) {
    const auto c = small_config(1.0, 3.0);
    const auto a = sample_couplings(c, 5);
    const auto b = sample_couplings(c, 5);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, sample_couplings(c, 6));
    ASSERT_EQ(a.size(), 16U);
    for (double w : a) {
        EXPECT_GE(w, 1.0);
        EXPECT_LT(w, 3.0);
    }
    auto other = c;
    other.master_seed = 2;
    EXPECT_NE(a, sample_couplings(other, 5));
}

TEST(Ensemble, CouplingsRoughlyUniform) {
    const auto c = small_config(0.0, 1.0);
    std::vector<int> bins(10, 0);
    int n = 0;
    for (std::uint64_t t = 0; t < 500; ++t)
        for (double w : sample_couplings(c, t)) {
            ++bins[static_cast<std::size_t>(w * 10)];
            ++n;
        }
    // chi^2 with 9 dof; 27.9 is the 0.999 quantile.
    double chi2 = 0.0;
    for (int b : bins) chi2 += (b - n / 10.0) * (b - n / 10.0) / (n / 10.0);
    EXPECT_LT(chi2, 27.9);
}

TEST(Ensemble, PotentialFollowsSitesAndSupport) {
    const auto c = small_config();
    std::vector<double> omega(16);
    for (int j = 0; j < 16; ++j) omega[static_cast<std::size_t>(j)] = j + 1.0;
    const auto v = potential(c, omega);
    const auto s = c.support();
    for (int i1 = 0; i1 < 16; ++i1)
        for (int i2 = 0; i2 < 16; ++i2) {
            const double val = v[static_cast<std::size_t>(c.setup.index(i1, i2))];
            if (!s.at(i1, i2)) {
                EXPECT_EQ(val, 0.0);
                continue;
            }
            // Nearest integer site, wrapped.
            const int j1 = static_cast<int>(std::lround(i1 * 0.25)) % 4;
            const int j2 = static_cast<int>(std::lround(i2 * 0.25)) % 4;
            EXPECT_EQ(val, j1 * 4 + j2 + 1.0);
        }
}

TEST(Ensemble, ZeroCouplingsGiveCleanOperator) {
    const auto c = small_config();
    const auto op = lattice::assemble(c.setup, potential(c, std::vector<double>(16, 0.0)));
    const auto clean = lattice::assemble(c.setup);
    EXPECT_LT((Eigen::MatrixXcd(op.H) - Eigen::MatrixXcd(clean.H)).norm(), 1e-14);
}

TEST(Ensemble, FullProfileConstantCouplingShiftsSpectrum) {
    auto c = small_config();
    c.profile.full = true;
    const auto clean = dense_spectrum(lattice::assemble(c.setup));
    const auto shifted = dense_spectrum(lattice::assemble(c.setup, potential(c, std::vector<double>(16, 2.5))));
    EXPECT_LT((shifted - clean - Eigen::VectorXd::Constant(clean.size(), 2.5)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Counting, WindowIsClosed) {
    Eigen::VectorXd v(6);
    v << 0.0, 1.0, 1.5, 2.0, 2.0, 3.0;
    EXPECT_EQ(count_window(v, 1.5, 0.5), 4);
    EXPECT_EQ(count_window(v, 1.5, 0.49), 1);
    EXPECT_EQ(count_window(v, 10.0, 1.0), 0);
    EXPECT_EQ(count_window(v, 2.0, 0.0), 2);
}

TEST(Counting, CleanClusterAndGap) {
    const auto c = small_config();
    const auto op = lattice::assemble(c.setup);
    // nphi = 2 states near B, then a gap up to ~3B.
    EXPECT_EQ(eigen_count_window(op, quarter_pi, 0.05), 2);
    EXPECT_EQ(eigen_count_window(op, 1.4, 0.15), 0);
    EXPECT_THROW(eigen_count_window(op, 1.5, 0.2), ValidationError);  // above 0.1/h^2 = 1.6
}

TEST(Counting, MatchesInertiaCount) {
    const auto c = small_config();
    for (std::uint64_t t = 0; t < 5; ++t) {
        const auto op = sample_operator(c, t);
        const auto spec = dense_spectrum(op);
        for (double eps : {0.01, 0.05, 0.2}) {
            const double E = 1.24;
            const int inertia = lattice::detail::count_below(op.H, E + eps + 1e-12) -
                                lattice::detail::count_below(op.H, E - eps - 1e-12);
            EXPECT_EQ(count_window(spec, E, eps), inertia) << t << ' ' << eps;
        }
    }
}

TEST(Sweep, ThreadCountDoesNotMatter) {
    const auto c = small_config();
    const std::vector<double> eps{0.01, 0.02, 0.03};
    WegnerOptions one{200, 1};
    WegnerOptions three{200, 3};
    const auto a = wegner_sweep(c, 1.24, eps, 12, one);
    const auto b = wegner_sweep(c, 1.24, eps, 12, three);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.slope_lo, b.slope_lo);
    EXPECT_EQ(a.slope_diff_hi, b.slope_diff_hi);
}

TEST(Sweep, StatisticsConsistent) {
    const auto c = small_config();
    const std::vector<double> eps{0.03, 0.01, 0.02};
    const auto st = wegner_sweep(c, 1.24, eps, 16, {300, 1});
    ASSERT_EQ(st.eps, (std::vector<double>{0.01, 0.02, 0.03}));
    for (std::size_t k = 0; k < 3; ++k) {
        double sum = 0.0;
        for (const auto& row : st.counts) sum += row[k];
        EXPECT_DOUBLE_EQ(st.mean[k], sum / 16);
        EXPECT_DOUBLE_EQ(st.s2eps[k], 2 * st.eps[k] / 4.0);
        EXPECT_NEAR(st.ratio[k], st.mean[k] / (st.s2eps[k] * 16.0), 1e-15);
        if (k > 0) EXPECT_GE(st.mean[k], st.mean[k - 1]);  // nested windows
    }
    for (const auto& row : st.counts)
        for (std::size_t k = 1; k < 3; ++k) EXPECT_GE(row[k], row[k - 1]);
    EXPECT_LE(st.slope_lo, st.slope);
    EXPECT_GE(st.slope_hi, st.slope);
    EXPECT_GE(st.c_w, *std::max_element(st.ratio.begin(), st.ratio.end()) * 0.999);
}

TEST(Sweep, RejectsBadInput) {
    const auto c = small_config();
    EXPECT_THROW(wegner_sweep(c, 1.24, {}, 10), ValidationError);
    EXPECT_THROW(wegner_sweep(c, 1.24, {0.01}, 1), ValidationError);
    EXPECT_THROW(wegner_sweep(c, 1.24, {-0.01}, 10), ValidationError);
    EXPECT_THROW(wegner_sweep(c, 1.5, {0.2}, 10), ValidationError);
}

TEST(BoxScaling, RecoversExponentFromSyntheticRuns) {
    std::vector<WegnerStats> runs;
    for (double L : {4.0, 8.0, 16.0}) {
        WegnerStats s;
        s.L = L;
        s.eps = {0.01, 0.02};
        s.mean = {0.3 * L * L, 0.6 * L * L};
        runs.push_back(s);
    }
    const auto b = box_scaling(runs);
    EXPECT_NEAR(b.exponent, 2.0, 1e-12);
    for (double e : b.per_eps) EXPECT_NEAR(e, 2.0, 1e-12);
    runs[1].eps = {0.01, 0.03};
    EXPECT_THROW(box_scaling(runs), ValidationError);
}
