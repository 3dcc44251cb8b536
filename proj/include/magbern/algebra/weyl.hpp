#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "magbern/algebra/gaussian_rational.hpp"
#include "magbern/core/errors.hpp"

namespace magbern::algebra {

/// Exponents (e1, e2, e3) of the ordered monomial d1^e1 d2^e2 d3^e3.
using Monomial = std::array<int, 3>;

/// Default cap on stored monomials before an operation gives up.
inline constexpr std::size_t kDefaultTermCap = 1'000'000;

/// Generators d1..dn (n = 2 or 3) with central commutators [dj, dk] = c(j,k).
class WeylAlgebra {
public:
    /// Two generators, [d1, d2] = iB with B symbolic.
    static WeylAlgebra planar() {
        WeylAlgebra a(2);
        a.set(0, 1, BPoly(GaussianRational::i(), 1));
        return a;
    }

    /// Three generators with [d1,d2] = iB3, [d2,d3] = iB1, [d3,d1] = iB2.
    static WeylAlgebra spatial(const mpq_class& b1, const mpq_class& b2, const mpq_class& b3) {
        WeylAlgebra a(3);
        a.set(0, 1, BPoly(GaussianRational(0, b3)));
        a.set(1, 2, BPoly(GaussianRational(0, b1)));
        a.set(0, 2, BPoly(GaussianRational(0, -b2)));
        return a;
    }

    [[nodiscard]] int generators() const { return n_; }
    /// [d_j, d_k] for 0-based j, k.
    [[nodiscard]] const BPoly& commutator(int j, int k) const { return c_[j][k]; }

    friend bool operator==(const WeylAlgebra& a, const WeylAlgebra& b) {
        return a.n_ == b.n_ && a.c_ == b.c_;
    }

private:
    explicit WeylAlgebra(int n) : n_(n) {}
    void set(int j, int k, const BPoly& v) {
        c_[j][k] = v;
        c_[k][j] = -v;
    }

    int n_;
    std::array<std::array<BPoly, 3>, 3> c_{};
};

/// Arbitrary (not necessarily ordered) combination of generator words.
struct WordPoly {
    std::map<std::vector<int>, BPoly> terms;  // letters are 0-based generator indices

    WordPoly& add(std::vector<int> word, const BPoly& c) {
        if (c.is_zero()) return *this;
        auto [it, inserted] = terms.try_emplace(std::move(word), c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms.erase(it);
        }
        return *this;
    }
};

/// Element of the algebra stored in normal-ordered form.
class WeylPoly {
public:
    explicit WeylPoly(WeylAlgebra alg, std::size_t term_cap = kDefaultTermCap)
        : alg_(std::move(alg)), cap_(term_cap) {}

    static WeylPoly identity(const WeylAlgebra& alg) {
        WeylPoly p(alg);
        p.add({0, 0, 0}, BPoly(1));
        return p;
    }
    static WeylPoly generator(const WeylAlgebra& alg, int j) {
        require(j >= 0 && j < alg.generators(), "generator index out of range");
        WeylPoly p(alg);
        Monomial m{0, 0, 0};
        m[static_cast<std::size_t>(j)] = 1;
        p.add(m, BPoly(1));
        return p;
    }
    /// d1^2 + ... + dn^2.
    static WeylPoly laplacian(const WeylAlgebra& alg) {
        WeylPoly p(alg);
        for (int j = 0; j < alg.generators(); ++j) {
            Monomial m{0, 0, 0};
            m[static_cast<std::size_t>(j)] = 2;
            p.add(m, BPoly(1));
        }
        return p;
    }

    [[nodiscard]] const WeylAlgebra& algebra() const { return alg_; }
    [[nodiscard]] const std::map<Monomial, BPoly>& terms() const { return terms_; }
    [[nodiscard]] std::size_t size() const { return terms_.size(); }
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }
    [[nodiscard]] std::size_t term_cap() const { return cap_; }
    void set_term_cap(std::size_t cap) { cap_ = cap; }

    void add(const Monomial& m, const BPoly& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        } else if (terms_.size() > cap_) {
            throw ResourceError("WeylPoly exceeded the term cap of " + std::to_string(cap_) +
                                " monomials");
        }
    }

    WeylPoly& operator+=(const WeylPoly& o) {
        for (const auto& [m, c] : o.terms_) add(m, c);
        return *this;
    }
    WeylPoly& operator-=(const WeylPoly& o) {
        for (const auto& [m, c] : o.terms_) add(m, -c);
        return *this;
    }
    friend WeylPoly operator+(WeylPoly a, const WeylPoly& b) { return a += b; }
    friend WeylPoly operator-(WeylPoly a, const WeylPoly& b) { return a -= b; }
    friend WeylPoly operator*(const BPoly& s, const WeylPoly& p) {
        WeylPoly out(p.alg_, p.cap_);
        for (const auto& [m, c] : p.terms_) out.add(m, s * c);
        return out;
    }

    /// p · d_j, reordered.
    [[nodiscard]] WeylPoly times_generator(int j) const {
        WeylPoly out(alg_, cap_);
        const auto uj = static_cast<std::size_t>(j);
        for (const auto& [m, c] : terms_) {
            Monomial moved = m;
            ++moved[uj];
            out.add(moved, c);
            // d_k^e d_j = d_j d_k^e - e [d_j, d_k] d_k^(e-1) for k > j.
            for (int k = j + 1; k < alg_.generators(); ++k) {
                const auto uk = static_cast<std::size_t>(k);
                if (m[uk] == 0) continue;
                Monomial lower = m;
                --lower[uk];
                out.add(lower, BPoly(-m[uk]) * alg_.commutator(j, k) * c);
            }
        }
        return out;
    }

    /// d_j · p, reordered.
    [[nodiscard]] WeylPoly generator_times(int j) const {
        WeylPoly out(alg_, cap_);
        const auto uj = static_cast<std::size_t>(j);
        for (const auto& [m, c] : terms_) {
            Monomial moved = m;
            ++moved[uj];
            out.add(moved, c);
            // d_j d_k^e = d_k^e d_j - e [d_k, d_j] d_k^(e-1) for k < j.
            for (int k = 0; k < j; ++k) {
                const auto uk = static_cast<std::size_t>(k);
                if (m[uk] == 0) continue;
                Monomial lower = m;
                --lower[uk];
                out.add(lower, BPoly(-m[uk]) * alg_.commutator(k, j) * c);
            }
        }
        return out;
    }

    friend WeylPoly operator*(const WeylPoly& p, const WeylPoly& q) {
        require(p.alg_ == q.alg_, "WeylPoly product across different algebras");
        WeylPoly out(p.alg_, p.cap_);
        for (const auto& [m, c] : q.terms_) {
            WeylPoly acc = c * p;
            for (int j = 0; j < p.alg_.generators(); ++j)
                for (int e = 0; e < m[static_cast<std::size_t>(j)]; ++e) acc = acc.times_generator(j);
            out += acc;
        }
        return out;
    }

    friend bool operator==(const WeylPoly& a, const WeylPoly& b) {
        return a.alg_ == b.alg_ && a.terms_ == b.terms_;
    }

    /// Canonical text: monomials in lexicographic exponent order, one per
    /// line, as "(coefficient) d1^a d2^b [d3^c]".
    [[nodiscard]] std::string str() const {
        if (terms_.empty()) return "0\n";
        std::string out;
        for (const auto& [m, c] : terms_) {
            out += "(" + c.str() + ")";
            for (int j = 0; j < alg_.generators(); ++j)
                out += " d" + std::to_string(j + 1) + "^" + std::to_string(m[static_cast<std::size_t>(j)]);
            out += "\n";
        }
        return out;
    }

private:
    WeylAlgebra alg_;
    std::size_t cap_;
    std::map<Monomial, BPoly> terms_;
};

/// Normal-ordered representative of a word combination.
///
/// Each word is read left to right and multiplied into an ordered
/// accumulator one letter at a time; since all commutators are central, a
/// letter passing d_k^e for k > j leaves exactly one lower-order correction.
inline WeylPoly normal_order(const WordPoly& p, const WeylAlgebra& alg,
                             std::size_t term_cap = kDefaultTermCap) {
    WeylPoly out(alg, term_cap);
    for (const auto& [word, c] : p.terms) {
        WeylPoly acc(alg, term_cap);
        acc.add({0, 0, 0}, c);
        for (int letter : word) {
            require(letter >= 0 && letter < alg.generators(), "word letter out of range");
            acc = acc.times_generator(letter);
        }
        out += acc;
    }
    return out;
}

/// Ordered input is already canonical; provided for symmetry.
inline WeylPoly normal_order(const WeylPoly& p) { return p; }

/// R(P) = sum_j d_j P d_j.
inline WeylPoly apply_r(const WeylPoly& p) {
    WeylPoly out(p.algebra(), p.term_cap());
    for (int j = 0; j < p.algebra().generators(); ++j) out += p.generator_times(j).times_generator(j);
    return out;
}

/// R^m(Id).
inline WeylPoly r_power_identity(const WeylAlgebra& alg, int m, std::size_t term_cap = kDefaultTermCap) {
    require(m >= 0, "power must be non-negative");
    WeylPoly p = WeylPoly::identity(alg);
    p.set_term_cap(term_cap);
    for (int i = 0; i < m; ++i) p = apply_r(p);
    return p;
}

}  // namespace magbern::algebra
