#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "magbern/core/errors.hpp"
#include "magbern/landau/grid_field.hpp"

namespace magbern::landau {

/// f_y(x) = exp(-(B/4)|x-y|^2 - i(B/2)(x1 y2 - x2 y1)).
struct CoherentState {
    Vec2 center;
    double B = 1.0;
};

inline cplx eval_coherent(const CoherentState& s, Vec2 x) {
    const double u1 = x.x1 - s.center.x1;
    const double u2 = x.x2 - s.center.x2;
    const double mod = -0.25 * s.B * (u1 * u1 + u2 * u2);
    const double phase = -0.5 * s.B * (x.x1 * s.center.x2 - x.x2 * s.center.x1);
    return std::polar(std::exp(mod), phase);
}

/// Complex polynomial in (u1, u2), stored sparsely by exponent pair.
class Poly2 {
public:
    using Key = std::pair<int, int>;

    Poly2() = default;
    explicit Poly2(cplx c) { add({0, 0}, c); }

    [[nodiscard]] const std::map<Key, cplx>& terms() const { return terms_; }
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }

    void add(Key k, cplx c) {
        if (c == cplx(0.0)) return;
        auto [it, inserted] = terms_.try_emplace(k, c);
        if (!inserted) {
            it->second += c;
            if (it->second == cplx(0.0)) terms_.erase(it);
        }
    }
    Poly2& operator+=(const Poly2& o) {
        for (const auto& [k, c] : o.terms_) add(k, c);
        return *this;
    }
    friend Poly2 operator*(cplx s, const Poly2& p) {
        Poly2 out;
        for (const auto& [k, c] : p.terms_) out.add(k, s * c);
        return out;
    }
    /// p · (a + b1 u1 + b2 u2).
    [[nodiscard]] Poly2 times_affine(cplx a, cplx b1, cplx b2) const {
        Poly2 out;
        for (const auto& [k, c] : terms_) {
            out.add(k, a * c);
            out.add({k.first + 1, k.second}, b1 * c);
            out.add({k.first, k.second + 1}, b2 * c);
        }
        return out;
    }
    /// d/du_axis (axis 1 or 2).
    [[nodiscard]] Poly2 derivative(int axis) const {
        Poly2 out;
        for (const auto& [k, c] : terms_) {
            const int e = axis == 1 ? k.first : k.second;
            if (e == 0) continue;
            out.add(axis == 1 ? Key{k.first - 1, k.second} : Key{k.first, k.second - 1}, c * double(e));
        }
        return out;
    }
    [[nodiscard]] cplx eval(double u1, double u2) const {
        constexpr int kMaxDeg = 64;
        std::array<double, kMaxDeg> p1{};
        std::array<double, kMaxDeg> p2{};
        p1[0] = 1.0;
        p2[0] = 1.0;
        int d1 = 0;
        int d2 = 0;
        cplx s = 0.0;
        for (const auto& [k, c] : terms_) {
            require(k.first < kMaxDeg && k.second < kMaxDeg, "Poly2 degree too large to evaluate");
            for (; d1 < k.first; ++d1) p1[static_cast<std::size_t>(d1) + 1] = p1[static_cast<std::size_t>(d1)] * u1;
            for (; d2 < k.second; ++d2) p2[static_cast<std::size_t>(d2) + 1] = p2[static_cast<std::size_t>(d2)] * u2;
            s += c * (p1[static_cast<std::size_t>(k.first)] * p2[static_cast<std::size_t>(k.second)]);
        }
        return s;
    }

private:
    std::map<Key, cplx> terms_;
};

/// Finite sum  sum_c P_c(x - y_c) f_{y_c}(x)  at a common field B.
///
/// The family is closed under magnetic and ordinary derivatives, which is
/// what makes closed-form derivative words available.
class LandauForm {
public:
    struct Component {
        Vec2 center;
        Poly2 poly;
    };

    explicit LandauForm(double B) : B_(B) { require(B > 0.0, "LandauForm needs B > 0"); }

    static LandauForm coherent(const CoherentState& s) {
        LandauForm f(s.B);
        f.add(s.center, Poly2(1.0));
        return f;
    }

    [[nodiscard]] double field() const { return B_; }
    [[nodiscard]] const std::vector<Component>& components() const { return comps_; }

    /// Adds P(x - y) f_y; components sharing a center are merged.
    void add(Vec2 center, Poly2 p) {
        if (p.is_zero()) return;
        for (auto it = comps_.begin(); it != comps_.end(); ++it) {
            if (it->center.x1 == center.x1 && it->center.x2 == center.x2) {
                it->poly += p;
                if (it->poly.is_zero()) comps_.erase(it);
                return;
            }
        }
        comps_.push_back({center, std::move(p)});
    }
    LandauForm& operator+=(const LandauForm& o) {
        require(o.B_ == B_, "LandauForm sum across fields");
        for (const auto& c : o.comps_) add(c.center, c.poly);
        return *this;
    }
    friend LandauForm operator*(cplx s, const LandauForm& f) {
        LandauForm out(f.B_);
        for (const auto& c : f.comps_) out.add(c.center, s * c.poly);
        return out;
    }

    /// d~1 = i d1 - (B/2) x2,  d~2 = i d2 + (B/2) x1.
    /// On P f_y:  d~j (P f_y) = (i dj P + P mj) f_y  with
    /// m1 = -(B/2)(i u1 + u2),  m2 = (B/2)(u1 - i u2).
    [[nodiscard]] LandauForm magnetic_derivative(int axis) const {
        require(axis == 1 || axis == 2, "axis must be 1 or 2");
        const cplx I(0.0, 1.0);
        const double h = 0.5 * B_;
        LandauForm out(B_);
        for (const auto& c : comps_) {
            Poly2 p = I * c.poly.derivative(axis);
            if (axis == 1)
                p += c.poly.times_affine(0.0, -h * I, -h);
            else
                p += c.poly.times_affine(0.0, h, -h * I);
            out.add(c.center, std::move(p));
        }
        return out;
    }

    /// Ordinary derivative: d1 f_y = (-(B/2) u1 - i(B/2) y2) f_y,
    /// d2 f_y = (-(B/2) u2 + i(B/2) y1) f_y.
    [[nodiscard]] LandauForm ordinary_derivative(int axis) const {
        require(axis == 1 || axis == 2, "axis must be 1 or 2");
        const cplx I(0.0, 1.0);
        const double h = 0.5 * B_;
        LandauForm out(B_);
        for (const auto& c : comps_) {
            Poly2 p = c.poly.derivative(axis);
            if (axis == 1)
                p += c.poly.times_affine(-I * h * c.center.x2, -h, 0.0);
            else
                p += c.poly.times_affine(I * h * c.center.x1, 0.0, -h);
            out.add(c.center, std::move(p));
        }
        return out;
    }

    /// a† = d~1 - i d~2; raises the Landau level by one.
    [[nodiscard]] LandauForm raise() const {
        const cplx I(0.0, 1.0);
        LandauForm out = magnetic_derivative(1);
        out += (-I) * magnetic_derivative(2);
        return out;
    }
    /// a = d~1 + i d~2; annihilates every f_y.
    [[nodiscard]] LandauForm lower() const {
        const cplx I(0.0, 1.0);
        LandauForm out = magnetic_derivative(1);
        out += I * magnetic_derivative(2);
        return out;
    }

    [[nodiscard]] cplx eval(Vec2 x) const {
        cplx s = 0.0;
        for (const auto& c : comps_)
            s += c.poly.eval(x.x1 - c.center.x1, x.x2 - c.center.x2) * eval_coherent({c.center, B_}, x);
        return s;
    }

    /// Samples on g. f_y factorizes into a function of x1 times a function
    /// of x2, so each component costs two 1-D exponential tables.
    [[nodiscard]] GridField sample(const GridGeometry& g) const {
        GridField out(g);
        std::vector<cplx> a(static_cast<std::size_t>(g.n1));
        std::vector<cplx> b(static_cast<std::size_t>(g.n2));
        for (const auto& c : comps_) {
            for (int i1 = 0; i1 < g.n1; ++i1) {
                const double x1 = g.x0 + i1 * g.h1;
                const double u1 = x1 - c.center.x1;
                a[static_cast<std::size_t>(i1)] = std::polar(std::exp(-0.25 * B_ * u1 * u1), -0.5 * B_ * x1 * c.center.x2);
            }
            for (int i2 = 0; i2 < g.n2; ++i2) {
                const double x2 = g.y0 + i2 * g.h2;
                const double u2 = x2 - c.center.x2;
                b[static_cast<std::size_t>(i2)] = std::polar(std::exp(-0.25 * B_ * u2 * u2), 0.5 * B_ * x2 * c.center.x1);
            }
            for (int i1 = 0; i1 < g.n1; ++i1) {
                const double u1 = g.x0 + i1 * g.h1 - c.center.x1;
                const cplx ai = a[static_cast<std::size_t>(i1)];
                for (int i2 = 0; i2 < g.n2; ++i2) {
                    const double u2 = g.y0 + i2 * g.h2 - c.center.x2;
                    out.data()[g.index(i1, i2)] += c.poly.eval(u1, u2) * (ai * b[static_cast<std::size_t>(i2)]);
                }
            }
        }
        out.set_form(std::make_shared<const LandauForm>(*this));
        return out;
    }

private:
    double B_;
    std::vector<Component> comps_;
};

/// One term alpha · (a†)^k f_y of a finite Landau-level expansion.
struct LevelTerm {
    int level = 0;
    Vec2 center;
    cplx coefficient = 1.0;
};

/// Function in the span of Landau levels, kept both as level terms and as a
/// closed form.
struct LevelExpansion {
    double B = 1.0;
    std::vector<LevelTerm> terms;

    [[nodiscard]] int max_level() const {
        int k = 0;
        for (const auto& t : terms) k = std::max(k, t.level);
        return k;
    }
    /// Sum of the terms at one level (or all levels when level < 0).
    [[nodiscard]] LandauForm form(int level = -1) const {
        LandauForm out(B);
        for (const auto& t : terms) {
            if (level >= 0 && t.level != level) continue;
            LandauForm g = LandauForm::coherent({t.center, B});
            for (int k = 0; k < t.level; ++k) g = g.raise();
            out += t.coefficient * g;
        }
        return out;
    }
    /// Smallest radius around the origin containing every center.
    [[nodiscard]] double center_radius() const {
        double r = 0.0;
        for (const auto& t : terms) r = std::max(r, std::hypot(t.center.x1, t.center.x2));
        return r;
    }
};

/// ‖(a†)^k f_y‖^2 = (2B)^k k! · 2π/B.
inline double level_state_norm2(int k, double B) {
    double v = 2.0 * std::numbers::pi / B;
    for (int j = 1; j <= k; ++j) v *= 2.0 * B * j;
    return v;
}

}  // namespace magbern::landau
