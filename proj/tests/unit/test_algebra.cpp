#include <gtest/gtest.h>

#include <map>
#include <vector>

#include "magbern/algebra/comm_poly.hpp"
#include "magbern/algebra/weyl.hpp"
#include "magbern/core/rng.hpp"

using namespace magbern;
using namespace magbern::algebra;

namespace {

using Word = std::vector<int>;
using WordMap = std::map<Word, BPoly>;

void accumulate(WordMap& m, const Word& w, const BPoly& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = m.try_emplace(w, c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) m.erase(it);
    }
}

// Literal string rewriting: swap the leftmost inversion d_a d_b (a > b) into
// d_b d_a + [d_a, d_b] until every word is sorted.
WeylPoly rewrite_oracle(WordMap words, const WeylAlgebra& alg) {
    WeylPoly out(alg);
    while (!words.empty()) {
        auto node = words.extract(words.begin());
        const Word w = node.key();
        const BPoly c = node.mapped();
        std::size_t i = 0;
        while (i + 1 < w.size() && w[i] <= w[i + 1]) ++i;
        if (i + 1 >= w.size()) {
            Monomial m{0, 0, 0};
            for (int l : w) ++m[static_cast<std::size_t>(l)];
            out.add(m, c);
            continue;
        }
        Word swapped = w;
        std::swap(swapped[i], swapped[i + 1]);
        accumulate(words, swapped, c);
        Word shorter(w.begin(), w.begin() + static_cast<long>(i));
        shorter.insert(shorter.end(), w.begin() + static_cast<long>(i) + 2, w.end());
        accumulate(words, shorter, alg.commutator(w[i], w[i + 1]) * c);
    }
    return out;
}

// R^m(Id) = Σ_α d_α1 ... d_αm d_αm ... d_α1 as raw words.
WordMap r_power_words(int n, int m) {
    WordMap out;
    std::vector<int> alpha(static_cast<std::size_t>(m), 0);
    while (true) {
        Word w(alpha.begin(), alpha.end());
        w.insert(w.end(), alpha.rbegin(), alpha.rend());
        accumulate(out, w, BPoly(1));
        int k = m - 1;
        while (k >= 0 && alpha[static_cast<std::size_t>(k)] == n - 1) alpha[static_cast<std::size_t>(k--)] = 0;
        if (k < 0) break;
        ++alpha[static_cast<std::size_t>(k)];
    }
    return out;
}

// Σ_k c_k(B) H^k as raw words, H = d1^2 + d2^2.
WordMap poly_in_h_words(const CommPoly& p) {
    WordMap out;
    for (const auto& [key, c] : p.terms()) {
        const auto [tp, bp] = key;
        for (int mask = 0; mask < (1 << tp); ++mask) {
            Word w;
            for (int j = 0; j < tp; ++j) {
                const int g = (mask >> j) & 1;
                w.push_back(g);
                w.push_back(g);
            }
            accumulate(out, w, BPoly(GaussianRational(c), bp));
        }
    }
    return out;
}

// F_m by the recursion evaluated numerically at (t, B), no polynomial algebra.
double f_numeric(int m, double t, double B) {
    if (m == 0) return 1.0;
    return 0.5 * ((t - B) * f_numeric(m - 1, t - 2 * B, B) + (t + B) * f_numeric(m - 1, t + 2 * B, B));
}

}  // namespace

TEST(FPoly, HandExpansions) {
    EXPECT_EQ(f_poly(0).str(), "1");
    EXPECT_EQ(f_poly(1).str(), "t");
    EXPECT_EQ(f_poly(2).str(), "t^2 + 2*B^2");
    EXPECT_EQ(f_poly(3).str(), "t^3 + 10*t*B^2");
}

TEST(FPoly, DegreeEqualsOrder) {
    for (int m = 0; m <= 12; ++m) EXPECT_EQ(f_poly(m).degree_t(), m);
}

TEST(FPoly, MatchesNumericRecursion) {
    for (int m = 0; m <= 8; ++m)
        for (double t : {-1.5, 0.0, 0.7, 3.0})
            for (double B : {0.0, 0.5, 2.0}) {
                const double want = f_numeric(m, t, B);
                EXPECT_NEAR(f_poly(m).eval(t, B), want, 1e-9 * std::max(1.0, std::abs(want)));
            }
}

TEST(Weyl, RPowerMatchesRewriteOracle) {
    const auto alg = WeylAlgebra::planar();
    for (int m = 0; m <= 4; ++m) EXPECT_EQ(r_power_identity(alg, m), rewrite_oracle(r_power_words(2, m), alg)) << m;
}

TEST(Weyl, FmOfHMatchesRewriteOracle) {
    const auto alg = WeylAlgebra::planar();
    for (int m = 0; m <= 4; ++m)
        EXPECT_EQ(substitute_h(f_poly(m), alg), rewrite_oracle(poly_in_h_words(f_poly(m)), alg)) << m;
}

TEST(Weyl, RecursionOracleEquality) {
    // Both sides built by the oracle only.
    const auto alg = WeylAlgebra::planar();
    for (int m = 1; m <= 4; ++m)
        EXPECT_EQ(rewrite_oracle(r_power_words(2, m), alg), rewrite_oracle(poly_in_h_words(f_poly(m)), alg)) << m;
}

TEST(Weyl, SpatialRPowerMatchesOracle) {
    const auto alg = WeylAlgebra::spatial(1, 2, -3);
    for (int m = 0; m <= 3; ++m) EXPECT_EQ(r_power_identity(alg, m), rewrite_oracle(r_power_words(3, m), alg)) << m;
}

TEST(Weyl, VerifyRecursion) {
    for (int m = 0; m <= 6; ++m) EXPECT_TRUE(verify_recursion(m)) << m;
}

TEST(Weyl, ROfIdIsLaplacian) {
    const auto alg = WeylAlgebra::planar();
    EXPECT_EQ(apply_r(WeylPoly::identity(alg)), WeylPoly::laplacian(alg));
}

TEST(Weyl, NormalOrderLinearAndIdempotent) {
    const auto alg = WeylAlgebra::spatial(2, 0, 1);
    SplitStream rng(7);
    auto random_words = [&] {
        WordPoly p;
        for (int t = 0; t < 5; ++t) {
            Word w;
            const int len = 1 + static_cast<int>(rng.next_u64() % 5);
            for (int i = 0; i < len; ++i) w.push_back(static_cast<int>(rng.next_u64() % 3));
            const long a = static_cast<long>(rng.next_u64() % 7) - 3;
            const long b = static_cast<long>(rng.next_u64() % 7) - 3;
            p.add(w, BPoly(GaussianRational(a, b)));
        }
        return p;
    };
    for (int trial = 0; trial < 20; ++trial) {
        const WordPoly p = random_words();
        const WordPoly q = random_words();
        const GaussianRational alpha(mpq_class(2, 3), 1);
        const GaussianRational beta(-1, mpq_class(1, 5));
        WordPoly comb;
        for (const auto& [w, c] : p.terms) comb.add(w, BPoly(alpha) * c);
        for (const auto& [w, c] : q.terms) comb.add(w, BPoly(beta) * c);
        const WeylPoly np = normal_order(p, alg);
        const WeylPoly nq = normal_order(q, alg);
        EXPECT_EQ(normal_order(comb, alg), BPoly(alpha) * np + BPoly(beta) * nq);
        WordPoly again;
        for (const auto& [m, c] : np.terms()) {
            Word w;
            for (int j = 0; j < 3; ++j) w.insert(w.end(), static_cast<std::size_t>(m[static_cast<std::size_t>(j)]), j);
            again.add(w, c);
        }
        EXPECT_EQ(normal_order(again, alg), np);
        WordMap wm(p.terms.begin(), p.terms.end());
        EXPECT_EQ(np, rewrite_oracle(wm, alg));
    }
}

TEST(Weyl, TermCapIsAnError) { EXPECT_THROW(r_power_identity(WeylAlgebra::planar(), 6, 10), ResourceError); }

TEST(FBounds, Examples) {
    EXPECT_TRUE(check_f_bounds(2, 0));
    EXPECT_TRUE(check_f_bounds(1, 5));
    EXPECT_TRUE(check_f_bounds(10, 10));
    // F_2(B) = 3B^2 sits in [2B^2, 8B^2].
    const auto v = f_poly(2).at_multiple_of_b(1);
    ASSERT_EQ(v.size(), 1U);
    EXPECT_EQ(v.at(2), 3);
}

TEST(FBounds, FullGrid) {
    for (int m = 1; m <= 10; ++m)
        for (int k = 0; k <= 10; ++k) EXPECT_TRUE(check_f_bounds(m, k)) << m << ',' << k;
}

TEST(FBounds, LevelsNonNegativeAndBelowL2Constant) {
    // max_k F_m((2k+1)B) <= (E + mB)^m for E/B up to 21, exactly.
    for (int m = 1; m <= 10; ++m)
        for (int e = 1; e <= 21; ++e) {
            mpq_class best = 0;
            for (int k = 0; 2 * k + 1 <= e; ++k) {
                const auto v = f_poly(m).at_multiple_of_b(2 * k + 1);
                const mpq_class c = v.empty() ? mpq_class(0) : v.begin()->second;
                ASSERT_EQ(v.size(), v.empty() ? 0U : 1U);
                EXPECT_GE(c, 0);
                if (c > best) best = c;
            }
            mpq_class cap = 1;
            for (int i = 0; i < m; ++i) cap *= e + m;
            EXPECT_LE(best, cap) << m << ',' << e;
        }
}

TEST(BernsteinConstant, Examples) {
    EXPECT_DOUBLE_EQ(bernstein_constant(0, 3, 1, BernsteinVariant::L2), 1.0);
    EXPECT_DOUBLE_EQ(bernstein_constant(0, 3, 1, BernsteinVariant::L1), 1.0);
    EXPECT_DOUBLE_EQ(bernstein_constant(1, 1, 1, BernsteinVariant::L2), 2.0);
    EXPECT_NEAR(bernstein_constant(2, 1, 1, BernsteinVariant::L1), 24.0, 1e-12);
    EXPECT_THROW(bernstein_constant(1, -1, 1, BernsteinVariant::L2), ValidationError);
}

TEST(Weyl3d, FieldAlignedReducesAtPowerTwo) {
    const auto r = weyl3d_counterexample(0, 0, 1);
    EXPECT_FALSE(r.counterexample);
    // R_3^2(Id) = H_3^2 + 2 B^2.
    ASSERT_EQ(r.coefficients.size(), 3U);
    EXPECT_EQ(r.coefficients[0], GaussianRational(2));
    EXPECT_EQ(r.coefficients[1], GaussianRational(0));
    EXPECT_EQ(r.coefficients[2], GaussianRational(1));
}

TEST(Weyl3d, RotationInvariance) {
    // (1,1,1) is (0,0,√3) in rotated generators, so R_3^2 = H^2 + 2|B|^2.
    const auto r = weyl3d_counterexample(1, 1, 1);
    EXPECT_FALSE(r.counterexample);
    EXPECT_EQ(r.coefficients[0], GaussianRational(6));
}

TEST(Weyl3d, PowerThreeFailsWithWitness) {
    const auto r = weyl3d_counterexample(0, 0, 1, 3);
    EXPECT_TRUE(r.counterexample);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_FALSE(r.residual.is_zero());
    EXPECT_GT((*r.witness)[2], 0);  // the residual lives on d3-bearing monomials
}

TEST(Weyl3d, ZeroFieldRejected) { EXPECT_THROW(weyl3d_counterexample(0, 0, 0), ValidationError); }
