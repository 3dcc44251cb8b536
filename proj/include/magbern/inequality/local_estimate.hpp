#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "magbern/core/errors.hpp"
#include "magbern/geometry/covering.hpp"
#include "magbern/geometry/mask.hpp"
#include "magbern/landau/landau_form.hpp"

namespace magbern::inequality {

using cplx = std::complex<double>;

/// Truncated bivariate power series Σ_{a+b<=d} c_ab u1^a u2^b.
class Taylor2 {
public:
    explicit Taylor2(int degree) : d_(degree), c_(static_cast<std::size_t>((degree + 1) * (degree + 2) / 2)) {
        require(degree >= 0, "Taylor degree must be non-negative");
    }

    [[nodiscard]] int degree() const { return d_; }
    [[nodiscard]] cplx& at(int a, int b) { return c_[slot(a, b)]; }
    [[nodiscard]] cplx at(int a, int b) const { return c_[slot(a, b)]; }

    Taylor2& operator+=(const Taylor2& o) {
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        return *this;
    }
    friend Taylor2 operator*(const Taylor2& p, const Taylor2& q) {
        Taylor2 out(p.d_);
        for (int a = 0; a <= p.d_; ++a)
            for (int b = 0; a + b <= p.d_; ++b) {
                const cplx x = p.at(a, b);
                if (x == cplx(0.0)) continue;
                for (int e = 0; a + b + e <= p.d_; ++e)
                    for (int f = 0; a + b + e + f <= p.d_; ++f) out.at(a + e, b + f) += x * q.at(e, f);
            }
        return out;
    }
    friend Taylor2 operator*(cplx s, Taylor2 p) {
        for (auto& v : p.c_) v *= s;
        return p;
    }
    /// Coefficientwise conjugate: the series of conj(F(conj z)).
    [[nodiscard]] Taylor2 conj_series() const {
        Taylor2 out = *this;
        for (auto& v : out.c_) v = std::conj(v);
        return out;
    }

    /// exp of a series with zero constant term. With E_k, q_j the degree-k
    /// and degree-j homogeneous parts, the Euler operator gives
    /// k E_k = Σ_{j=1..k} j q_j E_{k-j}.
    [[nodiscard]] Taylor2 exp_no_constant() const {
        require(at(0, 0) == cplx(0.0), "exp_no_constant needs a zero constant term");
        Taylor2 e(d_);
        e.at(0, 0) = 1.0;
        for (int k = 1; k <= d_; ++k)
            for (int j = 1; j <= k; ++j)
                for (int a = 0; a <= j; ++a) {
                    const cplx q = at(a, j - a);
                    if (q == cplx(0.0)) continue;
                    const cplx w = q * (static_cast<double>(j) / k);
                    for (int c = 0; c <= k - j; ++c) e.at(a + c, k - a - c) += w * e.at(c, k - j - c);
                }
        return e;
    }

    /// Σ_{a+b=k} |c_ab| r1^a r2^b.
    [[nodiscard]] double shell(int k, double r1, double r2) const {
        double s = 0.0;
        for (int a = 0; a <= k; ++a) s += std::abs(at(a, k - a)) * std::pow(r1, a) * std::pow(r2, k - a);
        return s;
    }

private:
    [[nodiscard]] std::size_t slot(int a, int b) const {
        const int k = a + b;
        return static_cast<std::size_t>(k * (k + 1) / 2 + a);
    }
    int d_;
    std::vector<cplx> c_;
};

/// Taylor model of |f|^2 = F · conj(F) at x0, continued to C^2 as
/// F(z) · conj(F(conj z)).
inline Taylor2 mod2_taylor(const landau::LandauForm& f, landau::Vec2 x0, int degree) {
    const double B = f.field();
    Taylor2 F(degree);
    for (const auto& comp : f.components()) {
        const landau::Vec2 y = comp.center;
        const double v1 = x0.x1 - y.x1;
        const double v2 = x0.x2 - y.x2;
        // f_y(x0 + u) = f_y(x0) exp(q(u)),
        // q = -(B/2)(v.u) - i(B/2)(u1 y2 - u2 y1) - (B/4)|u|^2.
        Taylor2 q(degree);
        const cplx I(0.0, 1.0);
        if (degree >= 1) {
            q.at(1, 0) = -0.5 * B * v1 - I * 0.5 * B * y.x2;
            q.at(0, 1) = -0.5 * B * v2 + I * 0.5 * B * y.x1;
        }
        if (degree >= 2) {
            q.at(2, 0) = -0.25 * B;
            q.at(0, 2) = -0.25 * B;
        }
        Taylor2 g = q.exp_no_constant();
        // P(u + v) by binomial expansion.
        Taylor2 p(degree);
        for (const auto& [key, c] : comp.poly.terms()) {
            const auto [ea, eb] = key;
            for (int a = 0; a <= ea; ++a)
                for (int b = 0; b <= eb; ++b) {
                    if (a + b > degree) continue;
                    const double w = std::tgamma(ea + 1.0) / (std::tgamma(a + 1.0) * std::tgamma(ea - a + 1.0)) *
                                     std::tgamma(eb + 1.0) / (std::tgamma(b + 1.0) * std::tgamma(eb - b + 1.0)) *
                                     std::pow(v1, ea - a) * std::pow(v2, eb - b);
                    p.at(a, b) += c * w;
                }
        }
        F += landau::eval_coherent({y, B}, x0) * (p * g);
    }
    return F * F.conj_series();
}

struct TaylorMajorant {
    double value = 0.0;   // Σ shells + tail
    double tail = 0.0;
    double ratio = 0.0;   // decay ratio of the last shell pairs
    bool bounded = true;
};

/// Majorant of sup |G| over the polydisc x0 + D_(r1, r2). Shells beyond the
/// truncation are extrapolated geometrically from the last two pairs of
/// shells (consecutive shells can alternate in size); if those pairs are
/// not decaying the majorant is reported unbounded.
inline TaylorMajorant taylor_majorant(const Taylor2& g, double r1, double r2) {
    TaylorMajorant m;
    const int d = g.degree();
    std::vector<double> s;
    for (int k = 0; k <= d; ++k) s.push_back(g.shell(k, r1, r2));
    for (double v : s) m.value += v;
    if (d < 3) {
        m.bounded = false;
        return m;
    }
    auto at = [&](int k) { return s[static_cast<std::size_t>(k)]; };
    const double last = at(d) + at(d - 1);
    const double prev = at(d - 2) + at(d - 3);
    m.ratio = prev > 0.0 ? last / prev : 0.0;
    if (m.ratio >= 0.8) {
        m.bounded = false;
        return m;
    }
    m.tail = last * m.ratio / (1.0 - m.ratio);
    m.value += m.tail;
    return m;
}

struct Mat2 {
    double a11 = 1.0;
    double a12 = 0.0;
    double a21 = 0.0;
    double a22 = 1.0;

    [[nodiscard]] double det() const { return a11 * a22 - a12 * a21; }
    [[nodiscard]] double norm_of(double x, double y) const { return std::hypot(a11 * x + a12 * y, a21 * x + a22 * y); }
};

struct LocalEstimate {
    double lhs = 0.0;         // ‖g‖_{L1(Q∩U)}
    double rhs_first = 0.0;   // first lower bound
    double rhs_second = 0.0;  // second lower bound
    double l1_q = 0.0;        // ‖g‖_{L1(Q)}
    double m = 0.0;           // M (>= 1)
    double vol_ratio = 0.0;   // vol(Q∩U) / vol(Q)
    bool holds = false;
};

/// Both lower bounds for ‖g‖_{L1(Q∩U)}, g = |f|^2, with
///   base = vol(A(Q∩U)) / (48π diam(A(Q))^2),  κ = 2 log M / log 2,
///   first  = ½ base^κ (vol(Q∩U)/vol(Q)) ‖g‖_{L1(Q)},
///   second = ½ base^(κ+1) ‖g‖_{L1(Q)},
/// and M = vol(Q)/‖g‖_{L1(Q)} · sup over Q + D_(4ℓ1, 4ℓ2) of the Taylor
/// model of g at the center of Q. U is a mask on the grid of f; node
/// (i1, i2) belongs to cell (i1, i2).
inline LocalEstimate local_estimate_check(const landau::GridField& f, const geometry::Rect& q,
                                          const geometry::SetMask& u, const Mat2& a = {}, int degree = 24) {
    require(f.form() != nullptr, "local estimate needs a field sampled from a closed form");
    const auto& g = f.geometry();
    require(u.n1() == g.n1 && u.n2() == g.n2, "mask grid does not match the field grid");
    require(std::abs(a.det()) > 0.0, "A must be invertible");
    LocalEstimate r;
    double vol_q = 0.0;
    double vol_qu = 0.0;
    for (int i1 = 0; i1 < g.n1; ++i1)
        for (int i2 = 0; i2 < g.n2; ++i2) {
            const auto p = g.point(i1, i2);
            if (!q.contains(p.x1, p.x2)) continue;
            const double v = std::norm(f.at(i1, i2)) * g.cell_area();
            vol_q += g.cell_area();
            r.l1_q += v;
            if (u.at(i1, i2)) {
                vol_qu += g.cell_area();
                r.lhs += v;
            }
        }
    require(vol_q > 0.0 && r.l1_q > 0.0, "rectangle holds no grid mass");
    r.vol_ratio = vol_qu / vol_q;

    const landau::Vec2 x0{q.x0 + 0.5 * q.w, q.y0 + 0.5 * q.h};
    const Taylor2 model = mod2_taylor(*f.form(), x0, degree);
    const auto maj = taylor_majorant(model, 4.5 * q.w, 4.5 * q.h);
    if (!maj.bounded) throw NumericalError("M unbounded at truncation (raise the Taylor degree or shrink Q)");
    r.m = std::max(1.0, vol_q / r.l1_q * maj.value);

    const double diam = std::max(a.norm_of(q.w, q.h), a.norm_of(q.w, -q.h));
    const double base = std::abs(a.det()) * vol_qu / (48.0 * std::numbers::pi * diam * diam);
    const double kappa = 2.0 * std::log(r.m) / std::numbers::ln2;
    if (vol_qu > 0.0) {
        r.rhs_first = 0.5 * std::pow(base, kappa) * r.vol_ratio * r.l1_q;
        r.rhs_second = 0.5 * std::pow(base, kappa + 1.0) * r.l1_q;
    }
    r.holds = r.lhs >= r.rhs_first * (1.0 - 1e-12);
    return r;
}

}  // namespace magbern::inequality
