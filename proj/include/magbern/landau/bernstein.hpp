#pragma once

#include <boost/math/special_functions/laguerre.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "magbern/algebra/comm_poly.hpp"
#include "magbern/core/errors.hpp"
#include "magbern/core/numerics.hpp"
#include "magbern/landau/grid_field.hpp"
#include "magbern/landau/landau_form.hpp"

namespace magbern::landau {

/// Truncation box, grid spacing and tolerance for continuum quadrature.
struct QuadratureSpec {
    double radius = 12.0;
    double h = 1.0 / 16.0;
    double tau = 1e-6;

    /// R = r_centers + 12/sqrt(B), h = 1/(16 sqrt(B)).
    static QuadratureSpec defaults(double B, double center_radius = 0.0) {
        require(B > 0.0, "quadrature defaults need B > 0");
        const double ml = 1.0 / std::sqrt(B);
        return {center_radius + 12.0 * ml, ml / 16.0, 1e-6};
    }
    [[nodiscard]] GridGeometry grid(Vec2 c = {}) const {
        require(radius > 0.0 && h > 0.0 && tau > 0.0, "quadrature spec needs R, h, tau > 0");
        return GridGeometry::centered(c, radius, h);
    }
};

/// Projector kernel onto the Landau levels (2k+1)B <= E:
/// (B/2π) Σ_k exp(-(B/4)|x-y|^2 - i(B/2)(x1 y2 - x2 y1)) L_k((B/2)|x-y|^2)
/// with L_k the Laguerre polynomials.
inline cplx eval_kernel(double E, double B, Vec2 x, Vec2 y) {
    require(B > 0.0, "eval_kernel needs B > 0");
    const double d2 = (x.x1 - y.x1) * (x.x1 - y.x1) + (x.x2 - y.x2) * (x.x2 - y.x2);
    double lag = 0.0;
    for (unsigned k = 0; (2.0 * k + 1.0) * B <= E; ++k) lag += boost::math::laguerre(k, 0.5 * B * d2);
    if (lag == 0.0) return 0.0;
    const cplx ph = std::polar(std::exp(-0.25 * B * d2), -0.5 * B * (x.x1 * y.x2 - x.x2 * y.x1));
    return B / (2.0 * std::numbers::pi) * lag * ph;
}

enum class DerivativeMethod { finite_difference, closed_form };

namespace detail {

/// Second-order first derivative along axis (1 or 2): centered inside;
/// at the two boundary lines one-sided, or wrapped when periodic.
inline GridField fd_partial(const GridField& f, int axis, bool periodic = false) {
    const auto& g = f.geometry();
    GridField out(g);
    const int n = axis == 1 ? g.n1 : g.n2;
    const double h = axis == 1 ? g.h1 : g.h2;
    auto get = [&](int i, int other) { return axis == 1 ? f.at(i, other) : f.at(other, i); };
    const int m = axis == 1 ? g.n2 : g.n1;
    for (int o = 0; o < m; ++o)
        for (int i = 0; i < n; ++i) {
            cplx d;
            if (periodic)
                d = (get((i + 1) % n, o) - get((i + n - 1) % n, o)) / (2.0 * h);
            else if (n < 3)
                d = (get(1, o) - get(0, o)) / h;
            else if (i == 0)
                d = (-3.0 * get(0, o) + 4.0 * get(1, o) - get(2, o)) / (2.0 * h);
            else if (i == n - 1)
                d = (3.0 * get(n - 1, o) - 4.0 * get(n - 2, o) + get(n - 3, o)) / (2.0 * h);
            else
                d = (get(i + 1, o) - get(i - 1, o)) / (2.0 * h);
            (axis == 1 ? out.at(i, o) : out.at(o, i)) = d;
        }
    return out;
}

inline double binom(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

}  // namespace detail

/// Samples d~_axis f. Closed form needs f to carry its LandauForm.
inline GridField magnetic_derivative(const GridField& f, int axis, double B, DerivativeMethod method) {
    require(axis == 1 || axis == 2, "axis must be 1 or 2");
    if (method == DerivativeMethod::closed_form) {
        require(f.form() != nullptr, "closed-form derivative needs a field sampled from a closed form");
        require(f.form()->field() == B, "closed-form derivative: field strength mismatch");
        return f.form()->magnetic_derivative(axis).sample(f.geometry());
    }
    const auto& g = f.geometry();
    GridField out = detail::fd_partial(f, axis);
    const cplx I(0.0, 1.0);
    for (int i1 = 0; i1 < g.n1; ++i1)
        for (int i2 = 0; i2 < g.n2; ++i2) {
            const Vec2 p = g.point(i1, i2);
            const double mult = axis == 1 ? -0.5 * B * p.x2 : 0.5 * B * p.x1;
            out.at(i1, i2) = I * out.at(i1, i2) + mult * f.at(i1, i2);
        }
    return out;
}

struct BernsteinSum {
    double value = 0.0;
    /// Largest boundary-line mass fraction seen across derivative words.
    double boundary_fraction = 0.0;
    /// boundary_fraction exceeded the tolerance.
    bool truncation_warning = false;
};

/// Σ over the 2^m words α of ‖d~_{α1}...d~_{αm} f‖^2.
inline BernsteinSum bernstein_sum(const GridField& f, int m, double B,
                                  DerivativeMethod method = DerivativeMethod::closed_form, double tau = 1e-6) {
    require(m >= 0, "bernstein_sum needs m >= 0");
    if (method == DerivativeMethod::closed_form)
        require(f.form() != nullptr, "closed-form Bernstein sum needs a field sampled from a closed form");
    BernsteinSum res;
    // Depth-first over words; closed forms are differentiated symbolically
    // and only sampled at the leaves.
    std::function<void(const GridField&, const LandauForm*, int)> walk;
    walk = [&](const GridField& cur, const LandauForm* form, int depth) {
        if (depth == m) {
            const GridField s = form ? form->sample(f.geometry()) : cur;
            res.value += s.norm2();
            res.boundary_fraction = std::max(res.boundary_fraction, s.boundary_fraction());
            return;
        }
        for (int axis = 1; axis <= 2; ++axis) {
            if (form) {
                const LandauForm next = form->magnetic_derivative(axis);
                walk(cur, &next, depth + 1);
            } else {
                walk(magnetic_derivative(cur, axis, B, method), nullptr, depth + 1);
            }
        }
    };
    walk(f, method == DerivativeMethod::closed_form ? f.form().get() : nullptr, 0);
    res.truncation_warning = res.boundary_fraction > tau;
    return res;
}

/// The m+1 distinct order-m derivatives of |f|^2: entry j is
/// ∂1^j ∂2^(m-j) |f|^2 (ordinary derivatives commute).
///
/// Finite differences act on sampled |f|^2 (wrapped when periodic). The
/// closed form uses
///   i^m ∂^α|u|^2 = Σ_{β<=α} (-1)^(m-|β|) d~^β u · conj(d~^(α\β) u),
/// which for α = 1^j 2^k reads
///   Σ_{a,b} C(j,a) C(k,b) (-1)^(m-a-b) D_{a,b} conj(D_{j-a,k-b}),
///   D_{a,b} = d~1^a d~2^b u.
inline std::vector<GridField> mod2_derivatives(const GridField& f, int m, double B, DerivativeMethod method,
                                               bool periodic = false) {
    require(m >= 0, "derivative order must be non-negative");
    const auto& g = f.geometry();
    std::vector<GridField> out;
    if (method == DerivativeMethod::finite_difference) {
        GridField mod2(g);
        for (std::size_t i = 0; i < g.size(); ++i) mod2.data()[i] = std::norm(f.data()[i]);
        for (int j = 0; j <= m; ++j) {
            GridField d = mod2;
            for (int r = 0; r < j; ++r) d = detail::fd_partial(d, 1, periodic);
            for (int r = 0; r < m - j; ++r) d = detail::fd_partial(d, 2, periodic);
            out.push_back(std::move(d));
        }
        return out;
    }
    require(f.form() != nullptr, "closed-form derivatives need a field sampled from a closed form");
    require(f.form()->field() == B, "closed-form derivatives: field strength mismatch");
    // D[a][b] = d~1^a d~2^b f for a + b <= m: d~2 acts first.
    const auto stride = static_cast<std::size_t>(m) + 1;
    std::vector<GridField> D(stride * stride);
    LandauForm base = *f.form();
    for (int b = 0; b <= m; ++b) {
        LandauForm cur = base;
        for (int a = 0; a + b <= m; ++a) {
            D[static_cast<std::size_t>(a) * stride + static_cast<std::size_t>(b)] = cur.sample(g);
            cur = cur.magnetic_derivative(1);
        }
        base = base.magnetic_derivative(2);
    }
    auto at = [&](int a, int b) -> const GridField& {
        return D[static_cast<std::size_t>(a) * stride + static_cast<std::size_t>(b)];
    };
    const cplx im_pow = std::pow(cplx(0.0, -1.0), m);
    for (int j = 0; j <= m; ++j) {
        const int k = m - j;
        GridField acc(g);
        for (int a = 0; a <= j; ++a)
            for (int b = 0; b <= k; ++b) {
                const double w = detail::binom(j, a) * detail::binom(k, b) * (((m - a - b) % 2) ? -1.0 : 1.0);
                const auto& p = at(a, b);
                const auto& q = at(j - a, k - b);
                for (std::size_t i = 0; i < g.size(); ++i) acc.data()[i] += w * p.data()[i] * std::conj(q.data()[i]);
            }
        for (auto& v : acc.data()) v = (im_pow * v).real();
        out.push_back(std::move(acc));
    }
    return out;
}

/// Σ over the 2^m words α of ‖∂^α |f|^2‖_{L1}; the words collapse to
/// C(m, j) copies of ∂1^j ∂2^(m-j).
inline BernsteinSum l1_bernstein_sum(const GridField& f, int m, double B,
                                     DerivativeMethod method = DerivativeMethod::closed_form, double tau = 1e-6,
                                     bool periodic = false) {
    BernsteinSum res;
    const auto d = mod2_derivatives(f, m, B, method, periodic);
    for (int j = 0; j <= m; ++j) {
        const auto& dj = d[static_cast<std::size_t>(j)];
        res.value += detail::binom(m, j) * dj.l1_norm();
        res.boundary_fraction = std::max(res.boundary_fraction, dj.boundary_fraction());
    }
    res.truncation_warning = !periodic && res.boundary_fraction > tau;
    return res;
}

/// <f, F_m(H) f> for a level expansion: Σ_k F_m((2k+1)B) ‖g_k‖^2 with
/// g_k the level-k part (quadrature on the given grid).
inline double spectral_form_value(const LevelExpansion& f, int m, const GridGeometry& g) {
    const algebra::CommPoly fm = algebra::f_poly(m);
    double s = 0.0;
    for (int k = 0; k <= f.max_level(); ++k) {
        const double n2 = f.form(k).sample(g).norm2();
        s += fm.eval((2.0 * k + 1.0) * f.B, f.B) * n2;
    }
    return s;
}

/// ∫ fn over the annulus r_in <= |x - c| <= r_out in polar coordinates:
/// Gauss-Legendre panels in the radius, the periodic trapezoid rule in the
/// angle.
inline double integrate_polar(const std::function<double(Vec2)>& fn, Vec2 c, double r_in, double r_out,
                              int radial_panels = 64, int nodes_per_panel = 16, int angles = 256) {
    require(r_out > r_in && r_in >= 0.0, "integrate_polar needs 0 <= r_in < r_out");
    double total = 0.0;
    const double dr = (r_out - r_in) / radial_panels;
    const double dth = 2.0 * std::numbers::pi / angles;
    for (int p = 0; p < radial_panels; ++p) {
        const auto rule = gauss_legendre(nodes_per_panel, r_in + p * dr, r_in + (p + 1) * dr);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double r = rule.nodes[q];
            double ring = 0.0;
            for (int a = 0; a < angles; ++a) {
                const double th = a * dth;
                ring += fn({c.x1 + r * std::cos(th), c.x2 + r * std::sin(th)});
            }
            total += rule.weights[q] * r * ring * dth;
        }
    }
    return total;
}

/// ‖f_0‖^2 over {|x| >= r}, integrated numerically out to r + 12/sqrt(B).
inline double coherent_tail_mass(double r, double B) {
    const CoherentState s{{0.0, 0.0}, B};
    return integrate_polar([&](Vec2 x) { return std::norm(eval_coherent(s, x)); }, {0.0, 0.0}, r,
                           r + 12.0 / std::sqrt(B));
}

}  // namespace magbern::landau
