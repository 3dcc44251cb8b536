#pragma once

#include <gmpxx.h>

#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace magbern::algebra {

/// Exact complex rational re + i·im.
class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(long v) : re_(v) {}  // NOLINT(google-explicit-constructor)
    GaussianRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }

    static GaussianRational i() { return {0, 1}; }

    [[nodiscard]] const mpq_class& re() const { return re_; }
    [[nodiscard]] const mpq_class& im() const { return im_; }
    [[nodiscard]] bool is_zero() const { return re_ == 0 && im_ == 0; }
    [[nodiscard]] GaussianRational conj() const { return {re_, -im_}; }
    [[nodiscard]] mpq_class norm2() const { return re_ * re_ + im_ * im_; }

    GaussianRational& operator+=(const GaussianRational& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class s = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(s);
        return *this;
    }
    /// Throws std::domain_error on division by zero (gmp would abort).
    GaussianRational& operator/=(const GaussianRational& o) {
        const mpq_class n = o.norm2();
        if (n == 0) throw std::domain_error("GaussianRational division by zero");
        *this *= o.conj();
        re_ /= n;
        im_ /= n;
        return *this;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re_, -a.im_}; }
    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

    /// "p/q", "i*p/q", "-i*p/q", "(a + i*b)".
    [[nodiscard]] std::string str() const {
        std::ostringstream os;
        if (im_ == 0) {
            os << re_.get_str();
        } else if (re_ == 0) {
            os << (im_ < 0 ? "-i*" : "i*") << mpq_class(abs(im_)).get_str();
        } else {
            os << "(" << re_.get_str() << (im_ < 0 ? " - i*" : " + i*") << mpq_class(abs(im_)).get_str()
               << ")";
        }
        return os.str();
    }

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

inline std::ostream& operator<<(std::ostream& os, const GaussianRational& g) { return os << g.str(); }

/// Polynomial in the field strength B with Gaussian-rational coefficients,
/// stored sparsely by power of B. Zero coefficients are never stored.
class BPoly {
public:
    BPoly() = default;
    BPoly(GaussianRational c, int power = 0) {  // NOLINT(google-explicit-constructor)
        if (!c.is_zero()) terms_.emplace(power, std::move(c));
    }
    BPoly(long c) : BPoly(GaussianRational(c)) {}  // NOLINT(google-explicit-constructor)

    /// The monomial B.
    static BPoly b() { return {GaussianRational(1), 1}; }

    [[nodiscard]] bool is_zero() const { return terms_.empty(); }
    [[nodiscard]] const std::map<int, GaussianRational>& terms() const { return terms_; }
    [[nodiscard]] bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 0); }
    [[nodiscard]] GaussianRational constant() const {
        auto it = terms_.find(0);
        return it == terms_.end() ? GaussianRational() : it->second;
    }

    BPoly& operator+=(const BPoly& o) {
        for (const auto& [p, c] : o.terms_) add(p, c);
        return *this;
    }
    BPoly& operator-=(const BPoly& o) {
        for (const auto& [p, c] : o.terms_) add(p, -c);
        return *this;
    }
    friend BPoly operator+(BPoly a, const BPoly& b) { return a += b; }
    friend BPoly operator-(BPoly a, const BPoly& b) { return a -= b; }
    friend BPoly operator-(const BPoly& a) { return BPoly() - a; }
    friend BPoly operator*(const BPoly& a, const BPoly& b) {
        BPoly out;
        for (const auto& [p, c] : a.terms_)
            for (const auto& [q, d] : b.terms_) out.add(p + q, c * d);
        return out;
    }
    BPoly& operator*=(const BPoly& o) { return *this = *this * o; }
    friend bool operator==(const BPoly& a, const BPoly& b) { return a.terms_ == b.terms_; }

    void add(int power, const GaussianRational& c) {
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(power, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    /// Canonical text: descending powers, e.g. "3*B^2 + i*1/2*B".
    [[nodiscard]] std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            if (!first) out += " + ";
            first = false;
            out += it->second.str();
            if (it->first == 1) out += "*B";
            if (it->first > 1) out += "*B^" + std::to_string(it->first);
        }
        return out;
    }

private:
    std::map<int, GaussianRational> terms_;
};

}  // namespace magbern::algebra
