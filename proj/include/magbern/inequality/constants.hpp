#pragma once

#include <cmath>
#include <numbers>

#include "magbern/core/errors.hpp"
#include "magbern/core/numerics.hpp"

namespace magbern::inequality {

/// Constant in ‖f‖^2 <= C ‖f‖^2_{L2(S)}.
///  structural: (C1/ρ)^(C2 + C3 |ℓ|_1 √E + C4 |ℓ|_1^2 B) with free C1..C4;
///  traced:     4 (96π/ρ)^(2 ln M / ln 2 + 1) with
///              ln M <= ln 16 + 2·240^2 (|ℓ|_1 √E + |ℓ|_1 √B + |ℓ|_1^2 B).
struct ThmConstants {
    enum class Mode { structural, traced };
    Mode mode = Mode::traced;
    double c1 = 96.0 * std::numbers::pi;
    double c2 = 1.0;
    double c3 = 1.0;
    double c4 = 1.0;

    static ThmConstants traced() { return {}; }
    static ThmConstants structural(double c1, double c2, double c3, double c4) {
        return {Mode::structural, c1, c2, c3, c4};
    }
};

/// Upper bound for ln M in the traced chain.
inline double traced_log_m(double E, double B, double l_sum) {
    return std::log(16.0) + 2.0 * 240.0 * 240.0 * (l_sum * std::sqrt(E) + l_sum * std::sqrt(B) + l_sum * l_sum * B);
}

/// The constant as a Magnitude (the traced value overflows doubles for
/// |ℓ|_1 of order one). `l_sum` is |ℓ|_1 = ℓ1 + ℓ2.
inline Magnitude theoretical_constant(double E, double B, double l_sum, double rho,
                                      const ThmConstants& c = ThmConstants::traced()) {
    require(rho > 0.0 && rho <= 1.0, "rho must lie in (0, 1]");
    require(B >= 0.0 && E >= 0.0 && l_sum >= 0.0, "E, B and |l|_1 must be non-negative");
    require(B == 0.0 || E >= B, "need E >= B when B > 0");
    if (c.mode == ThmConstants::Mode::structural) {
        require(c.c1 > 0.0 && c.c2 >= 0.0 && c.c3 >= 0.0 && c.c4 >= 0.0, "structural constants must be positive");
        const double expo = c.c2 + c.c3 * l_sum * std::sqrt(E) + c.c4 * l_sum * l_sum * B;
        // Clamp at 1 when C1 < ρ would make the base small.
        return Magnitude::from_log(std::max(0.0, expo * std::log(c.c1 / rho)));
    }
    const double expo = 2.0 * traced_log_m(E, B, l_sum) / std::numbers::ln2 + 1.0;
    return Magnitude::from_log(std::log(4.0) + expo * std::log(96.0 * std::numbers::pi / rho));
}

struct SeriesBound {
    double partial_sum = 0.0;
    double tail_bound = 0.0;
    double bound = 0.0;  // exp(2 s^2 + s)
    int terms = 0;
    bool holds = false;
};

/// Σ_{m>=0} (s √m)^m / m!  against  exp(2 s^2 + s).
///
/// Terms are summed in log space until the ratio test certifies the tail:
/// once t_{m+1}/t_m <= q < 1 for all later m, the tail is <= t_{m+1}/(1 - q).
/// The ratio s √(m+1) (1 + 1/m)^(m/2) / (m+1) is bounded by s √e / √(m+1),
/// which is decreasing in m.
inline SeriesBound series_bound_check(double s, int max_terms = 100000) {
    require(s >= 0.0, "s must be non-negative");
    SeriesBound r;
    r.bound = std::exp(2.0 * s * s + s);
    if (s == 0.0) {
        r.partial_sum = 1.0;  // 0^0 = 1
        r.terms = 1;
        r.holds = true;
        return r;
    }
    double log_sum = 0.0;  // m = 0 term is 1
    double log_t = 0.0;
    for (int m = 1; m <= max_terms; ++m) {
        log_t = m * std::log(s * std::sqrt(static_cast<double>(m))) - std::lgamma(m + 1.0);
        log_sum = log_add(log_sum, log_t);
        const double q = s * std::sqrt(std::numbers::e / (m + 1.0));
        if (q < 0.5) {
            // t_{m+1} <= q t_m.
            const double log_tail = log_t + std::log(q) - std::log1p(-q);
            r.terms = m + 1;
            if (log_tail - log_sum < std::log(1e-12)) {
                r.partial_sum = std::exp(log_sum);
                r.tail_bound = std::exp(log_tail);
                r.holds = r.partial_sum + r.tail_bound <= r.bound;
                return r;
            }
        }
    }
    throw NumericalError("series did not reach the tail certificate within max_terms");
}

/// Upper bound on ‖f_y‖^2_{L2(S)} when vol(S ∩ B_n(y)) <= 1/n:
/// ‖f_y‖_∞^2 = 1 on the ball, and the Gaussian tail outside it integrates to
/// (2π/B) exp(-B n^2 / 2).
inline double necessity_bound(double n, double B) {
    require(n > 0.0 && B > 0.0, "necessity bound needs n > 0 and B > 0");
    return 1.0 / n + 2.0 * std::numbers::pi / B * std::exp(-0.5 * B * n * n);
}

}  // namespace magbern::inequality
