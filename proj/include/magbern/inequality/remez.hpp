#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "magbern/core/errors.hpp"
#include "magbern/core/numerics.hpp"

namespace magbern::inequality {

using cplx = std::complex<double>;

/// Finite union of closed intervals in [0, 1].
struct IntervalSet {
    std::vector<std::pair<double, double>> parts;

    /// Total length, counting overlaps once.
    [[nodiscard]] double measure() const {
        auto p = parts;
        std::sort(p.begin(), p.end());
        double total = 0.0;
        double reach = -INFINITY;
        for (auto [a, b] : p) {
            a = std::max(a, reach);
            if (b > a) total += b - a;
            reach = std::max(reach, b);
        }
        return total;
    }
    void validate() const {
        for (auto [a, b] : parts) require(0.0 <= a && a <= b && b <= 1.0, "intervals must lie in [0, 1]");
        require(measure() > 0.0, "interval set must have positive length");
    }
};

/// Polynomial Σ c_k z^k.
struct ComplexPoly {
    std::vector<cplx> coeffs;

    [[nodiscard]] int degree() const {
        int d = static_cast<int>(coeffs.size()) - 1;
        while (d > 0 && coeffs[static_cast<std::size_t>(d)] == cplx(0.0)) --d;
        return std::max(d, 0);
    }
    [[nodiscard]] cplx operator()(cplx z) const {
        cplx s = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * z + *it;
        return s;
    }
};

/// (4 / |E|)^n.
inline double remez_bound(int n, double measure) {
    require(n >= 0, "degree must be non-negative");
    require(measure > 0.0 && measure <= 1.0, "measure must lie in (0, 1]");
    return std::pow(4.0 / measure, n);
}

/// sup of |p| over a real interval set (grid plus golden-section refinement).
inline double sup_abs(const ComplexPoly& p, const IntervalSet& e, int points = 10000) {
    double s = 0.0;
    for (auto [a, b] : e.parts) s = std::max(s, grid_sup([&](double t) { return std::abs(p(t)); }, a, b, points));
    return s;
}

struct SupComparison {
    double sup_full = 0.0;  // over [0, 1]
    double sup_set = 0.0;   // over E
    double bound = 0.0;     // multiplier in front of sup_set
    bool holds = false;

    [[nodiscard]] double ratio() const { return sup_set > 0.0 ? sup_full / sup_set : INFINITY; }
};

/// sup_{[0,1]} |P| <= (4/|E|)^deg P · sup_E |P|.
inline SupComparison remez_check(const ComplexPoly& p, const IntervalSet& e) {
    e.validate();
    SupComparison r;
    r.sup_full = sup_abs(p, {{{0.0, 1.0}}});
    r.sup_set = sup_abs(p, e);
    r.bound = remez_bound(p.degree(), std::min(1.0, e.measure()));
    r.holds = r.sup_full <= r.bound * r.sup_set * (1.0 + 1e-8);
    return r;
}

/// Polynomial stand-in for an analytic φ on D_{4+ε}.
struct AnalyticSample {
    ComplexPoly phi;

    /// max |φ| on |z| = 4, which by the maximum principle is the sup over D_4.
    [[nodiscard]] double max_modulus(double radius = 4.0) const {
        const double two_pi = 2.0 * std::numbers::pi;
        return grid_sup([&](double th) { return std::abs(phi(std::polar(radius, th))); }, 0.0, two_pi, 4096);
    }
};

struct KovrijkineResult {
    SupComparison sups;
    double m_phi = 0.0;
    double exponent = 0.0;  // 2 log M / log 2
};

/// sup_{[0,1]} |φ| <= (12/|E|)^(2 log M_φ / log 2) sup_E |φ|.
inline KovrijkineResult kovrijkine_check(const AnalyticSample& s, const IntervalSet& e) {
    e.validate();
    require(std::abs(s.phi(0.0)) >= 1.0 - 1e-12, "need |phi(0)| >= 1");
    KovrijkineResult r;
    r.m_phi = std::max(1.0, s.max_modulus());
    r.exponent = 2.0 * std::log(r.m_phi) / std::numbers::ln2;
    r.sups.sup_full = sup_abs(s.phi, {{{0.0, 1.0}}});
    r.sups.sup_set = sup_abs(s.phi, e);
    r.sups.bound = std::pow(12.0 / std::min(1.0, e.measure()), r.exponent);
    r.sups.holds = r.sups.sup_full <= r.sups.bound * r.sups.sup_set * (1.0 + 1e-8);
    return r;
}

}  // namespace magbern::inequality
