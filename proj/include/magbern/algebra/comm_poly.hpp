#pragma once

#include <gmpxx.h>

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "magbern/algebra/weyl.hpp"
#include "magbern/core/errors.hpp"

namespace magbern::algebra {

/// Polynomial in t whose coefficients are rational polynomials in B.
/// Stored as (t power, B power) -> nonzero rational.
class CommPoly {
public:
    using Key = std::pair<int, int>;

    CommPoly() = default;
    static CommPoly constant(const mpq_class& c) {
        CommPoly p;
        p.add({0, 0}, c);
        return p;
    }
    static CommPoly t() {
        CommPoly p;
        p.add({1, 0}, 1);
        return p;
    }
    /// c·B (as a polynomial of t-degree zero).
    static CommPoly b_times(const mpq_class& c) {
        CommPoly p;
        p.add({0, 1}, c);
        return p;
    }

    [[nodiscard]] const std::map<Key, mpq_class>& terms() const { return terms_; }
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }
    [[nodiscard]] int degree_t() const {
        int d = -1;
        for (const auto& [k, c] : terms_) d = std::max(d, k.first);
        return d;
    }

    void add(Key k, const mpq_class& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    CommPoly& operator+=(const CommPoly& o) {
        for (const auto& [k, c] : o.terms_) add(k, c);
        return *this;
    }
    friend CommPoly operator+(CommPoly a, const CommPoly& b) { return a += b; }
    friend CommPoly operator-(CommPoly a, const CommPoly& b) {
        for (const auto& [k, c] : b.terms_) a.add(k, -c);
        return a;
    }
    friend CommPoly operator*(const CommPoly& a, const CommPoly& b) {
        CommPoly out;
        for (const auto& [k, c] : a.terms_)
            for (const auto& [l, d] : b.terms_) out.add({k.first + l.first, k.second + l.second}, c * d);
        return out;
    }
    friend CommPoly operator*(const mpq_class& s, const CommPoly& a) {
        CommPoly out;
        for (const auto& [k, c] : a.terms_) out.add(k, s * c);
        return out;
    }
    friend bool operator==(const CommPoly& a, const CommPoly& b) { return a.terms_ == b.terms_; }

    /// p(t + c·B).
    [[nodiscard]] CommPoly shift(const mpq_class& c) const {
        CommPoly out;
        for (const auto& [k, coef] : terms_) {
            const auto [i, j] = k;
            mpz_class binom = 1;
            mpq_class cpow = 1;
            // (t + cB)^i = sum_r C(i, r) t^(i-r) (cB)^r
            for (int r = 0; r <= i; ++r) {
                out.add({i - r, j + r}, coef * mpq_class(binom) * cpow);
                binom = binom * (i - r) / (r + 1);
                cpow *= c;
            }
        }
        return out;
    }

    /// Substitutes t = a·B; result maps B power -> coefficient.
    [[nodiscard]] std::map<int, mpq_class> at_multiple_of_b(const mpq_class& a) const {
        std::map<int, mpq_class> out;
        for (const auto& [k, c] : terms_) {
            mpq_class v = c;
            for (int r = 0; r < k.first; ++r) v *= a;
            out[k.first + k.second] += v;
        }
        std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
        return out;
    }

    [[nodiscard]] double eval(double tv, double bv) const {
        double s = 0.0;
        for (const auto& [k, c] : terms_) s += c.get_d() * std::pow(tv, k.first) * std::pow(bv, k.second);
        return s;
    }

    /// Canonical text, t-power descending then B-power descending:
    /// "t^3 + 10*t*B^2", "1", "-1/2*t".
    [[nodiscard]] std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto [i, j] = it->first;
            mpq_class c = it->second;
            const bool neg = c < 0;
            if (neg) c = -c;
            if (first) {
                if (neg) out += "-";
            } else {
                out += neg ? " - " : " + ";
            }
            first = false;
            std::string body;
            auto append = [&](const std::string& s) {
                if (!body.empty()) body += "*";
                body += s;
            };
            if (c != 1 || (i == 0 && j == 0)) append(c.get_str());
            if (i == 1) append("t");
            if (i > 1) append("t^" + std::to_string(i));
            if (j == 1) append("B");
            if (j > 1) append("B^" + std::to_string(j));
            out += body;
        }
        return out;
    }

private:
    std::map<Key, mpq_class> terms_;
};

/// F_0 = 1, F_{m+1}(t) = 1/2((t - B) F_m(t - 2B) + (t + B) F_m(t + 2B)).
inline CommPoly f_poly(int m) {
    require(m >= 0, "f_poly needs m >= 0");
    CommPoly f = CommPoly::constant(1);
    const mpq_class half(1, 2);
    for (int i = 0; i < m; ++i) {
        const CommPoly lo = (CommPoly::t() - CommPoly::b_times(1)) * f.shift(-2);
        const CommPoly hi = (CommPoly::t() + CommPoly::b_times(1)) * f.shift(2);
        f = half * (lo + hi);
    }
    return f;
}

/// p(H) in the planar algebra, with B kept symbolic.
inline WeylPoly substitute_h(const CommPoly& p, const WeylAlgebra& alg,
                             std::size_t term_cap = kDefaultTermCap) {
    require(alg.generators() == 2, "substitute_h expects the planar algebra");
    const WeylPoly h = WeylPoly::laplacian(alg);
    WeylPoly out(alg, term_cap);
    const int deg = p.degree_t();
    WeylPoly hpow = WeylPoly::identity(alg);
    hpow.set_term_cap(term_cap);
    for (int i = 0; i <= deg; ++i) {
        for (const auto& [k, c] : p.terms())
            if (k.first == i) out += BPoly(GaussianRational(c), k.second) * hpow;
        if (i < deg) hpow = hpow * h;
    }
    return out;
}

/// Exact check that R^m(Id) = F_m(H) in the planar algebra.
inline bool verify_recursion(int m, std::size_t term_cap = kDefaultTermCap) {
    require(m >= 0, "verify_recursion needs m >= 0");
    const WeylAlgebra alg = WeylAlgebra::planar();
    return r_power_identity(alg, m, term_cap) == substitute_h(f_poly(m), alg, term_cap);
}

/// Exact check of 2^-m P <= F_m(t) <= P at t = (2k+1)B, with
/// P = (t+B)(t+3B)...(t+(2m-1)B), valid for every B >= 0.
///
/// Both sides are polynomials in B; the comparison requires every
/// coefficient of the difference to be non-negative.
inline bool check_f_bounds(int m, int k) {
    require(m >= 1 && k >= 0, "check_f_bounds needs m >= 1, k >= 0");
    const mpq_class t0(2 * k + 1);
    const auto f = f_poly(m).at_multiple_of_b(t0);
    mpq_class prod = 1;
    for (int j = 1; j <= m; ++j) prod *= t0 + (2 * j - 1);
    std::map<int, mpq_class> upper{{m, prod}};
    std::map<int, mpq_class> lower{{m, prod / mpq_class(mpz_class(1) << m)}};
    auto nonneg_diff = [](const std::map<int, mpq_class>& a, const std::map<int, mpq_class>& b) {
        std::map<int, mpq_class> d = a;
        for (const auto& [p, c] : b) d[p] -= c;
        for (const auto& [p, c] : d)
            if (c < 0) return false;
        return true;
    };
    return nonneg_diff(upper, f) && nonneg_diff(f, lower);
}

enum class BernsteinVariant { L2, L1 };

/// (E + Bm)^m for L2, 2^{3m/2} (E + Bm)^{m/2} for L1.
inline double bernstein_constant(int m, double energy, double field, BernsteinVariant v) {
    require(m >= 0, "bernstein_constant needs m >= 0");
    require(energy >= 0.0 && field >= 0.0, "bernstein_constant needs E >= 0 and B >= 0");
    const double base = energy + field * m;
    if (v == BernsteinVariant::L2) return std::pow(base, m);
    return std::pow(2.0, 1.5 * m) * std::pow(base, 0.5 * m);
}

/// Outcome of trying to write R_3^power(Id) as a polynomial in H_3.
struct Weyl3dResult {
    bool counterexample = false;
    int power = 2;
    /// Coefficients c_0..c_power of the best exact fit sum c_k H^k
    /// (free unknowns set to zero).
    std::vector<GaussianRational> coefficients;
    /// R_3^power(Id) - sum c_k H^k; zero iff the reduction exists.
    WeylPoly residual;
    /// First monomial of the residual when it is nonzero.
    std::optional<Monomial> witness;
};

namespace detail {

/// Row-reduces [A | b] over Gaussian rationals. Returns pivot columns and
/// the reduced system; inconsistent rows are left as 0 = nonzero.
inline std::vector<GaussianRational> solve_exact(std::vector<std::vector<GaussianRational>> a,
                                                 std::vector<GaussianRational> b, int cols) {
    const auto rows = a.size();
    std::vector<int> pivot_of_row;
    std::size_t r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][static_cast<std::size_t>(c)].is_zero()) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        std::swap(b[p], b[r]);
        const GaussianRational inv = GaussianRational(1) / a[r][static_cast<std::size_t>(c)];
        for (auto& x : a[r]) x *= inv;
        b[r] *= inv;
        for (std::size_t q = 0; q < rows; ++q) {
            if (q == r) continue;
            const GaussianRational f = a[q][static_cast<std::size_t>(c)];
            if (f.is_zero()) continue;
            for (int j = 0; j < cols; ++j)
                a[q][static_cast<std::size_t>(j)] -= f * a[r][static_cast<std::size_t>(j)];
            b[q] -= f * b[r];
        }
        pivot_of_row.push_back(c);
        ++r;
    }
    std::vector<GaussianRational> x(static_cast<std::size_t>(cols));
    for (std::size_t i = 0; i < pivot_of_row.size(); ++i) x[static_cast<std::size_t>(pivot_of_row[i])] = b[i];
    return x;
}

}  // namespace detail

/// Tries to write R_3^power(Id) as sum_{k<=power} c_k H_3^k for the field
/// (B1, B2, B3) by an exact linear solve over the monomial basis.
inline Weyl3dResult weyl3d_counterexample(const mpq_class& b1, const mpq_class& b2, const mpq_class& b3,
                                          int power = 2) {
    require(b1 != 0 || b2 != 0 || b3 != 0, "weyl3d_counterexample needs a nonzero field");
    require(power >= 0, "power must be non-negative");
    const WeylAlgebra alg = WeylAlgebra::spatial(b1, b2, b3);
    const WeylPoly target = r_power_identity(alg, power);
    const WeylPoly h = WeylPoly::laplacian(alg);
    std::vector<WeylPoly> hp{WeylPoly::identity(alg)};
    for (int k = 1; k <= power; ++k) hp.push_back(hp.back() * h);

    std::map<Monomial, std::size_t> row_of;
    auto index = [&](const WeylPoly& p) {
        for (const auto& [m, c] : p.terms()) row_of.try_emplace(m, row_of.size());
    };
    index(target);
    for (const auto& p : hp) index(p);

    const int cols = power + 1;
    std::vector<std::vector<GaussianRational>> a(row_of.size(),
                                                 std::vector<GaussianRational>(static_cast<std::size_t>(cols)));
    std::vector<GaussianRational> rhs(row_of.size());
    auto scalar = [](const BPoly& c) {
        require(c.is_constant(), "spatial algebra coefficients must be numeric");
        return c.constant();
    };
    for (int k = 0; k < cols; ++k)
        for (const auto& [m, c] : hp[static_cast<std::size_t>(k)].terms())
            a[row_of[m]][static_cast<std::size_t>(k)] = scalar(c);
    for (const auto& [m, c] : target.terms()) rhs[row_of[m]] = scalar(c);

    Weyl3dResult res{false, power, detail::solve_exact(a, rhs, cols), target, std::nullopt};
    for (int k = 0; k < cols; ++k)
        res.residual -= BPoly(res.coefficients[static_cast<std::size_t>(k)]) * hp[static_cast<std::size_t>(k)];
    res.counterexample = !res.residual.is_zero();
    if (res.counterexample) res.witness = res.residual.terms().begin()->first;
    return res;
}

}  // namespace magbern::algebra
