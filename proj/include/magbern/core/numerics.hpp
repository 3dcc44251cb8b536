#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "magbern/core/errors.hpp"

namespace magbern {

/// Positive quantity stored by its natural logarithm.
///
/// Bound constants in this library routinely exceed the double range
/// (exponents of several thousand), so comparisons happen in log space.
struct Magnitude {
    double log = 0.0;

    static Magnitude from_value(double v) {
        require(v > 0.0, "Magnitude::from_value needs a positive value");
        return {std::log(v)};
    }
    static Magnitude from_log(double l) { return {l}; }

    /// exp(log); +inf when it overflows.
    [[nodiscard]] double value() const { return std::exp(log); }
    [[nodiscard]] bool finite_as_double() const {
        return log < std::log(std::numeric_limits<double>::max());
    }

    friend Magnitude operator*(Magnitude a, Magnitude b) { return {a.log + b.log}; }
    friend Magnitude operator/(Magnitude a, Magnitude b) { return {a.log - b.log}; }
    friend auto operator<=>(Magnitude a, Magnitude b) { return a.log <=> b.log; }
    friend bool operator==(Magnitude a, Magnitude b) = default;
};

/// log(exp(a) + exp(b)) without overflow.
inline double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule on [a, b] (Newton iteration on P_n).
inline QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0) {
    require(n >= 1, "gauss_legendre needs at least one node");
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        rule.nodes[lo] = mid - half * x;
        rule.nodes[hi] = mid + half * x;
        rule.weights[lo] = half * w;
        rule.weights[hi] = half * w;
    }
    return rule;
}

/// Golden-section search for a local maximum of f on [lo, hi].
inline std::pair<double, double> golden_max(const std::function<double(double)>& f, double lo,
                                            double hi, double rel_tol = 1e-10, int max_iter = 200) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > rel_tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

/// Sup of f over [lo, hi]: uniform grid, then golden-section refinement
/// around the best `refine` grid candidates.
inline double grid_sup(const std::function<double(double)>& f, double lo, double hi,
                       int points = 10000, int refine = 5) {
    require(hi >= lo, "grid_sup needs lo <= hi");
    if (hi == lo) return f(lo);
    const int n = std::max(points, 2);
    const double step = (hi - lo) / (n - 1);
    std::vector<std::pair<double, int>> samples;
    samples.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) samples.emplace_back(f(lo + step * i), i);
    const auto k = static_cast<std::size_t>(std::min(refine, n));
    std::partial_sort(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(k),
                      samples.end(), [](auto& x, auto& y) { return x.first > y.first; });
    double best = samples.front().first;
    for (std::size_t j = 0; j < k; ++j) {
        const int i = samples[j].second;
        const double a = std::max(lo, lo + step * (i - 1));
        const double b = std::min(hi, lo + step * (i + 1));
        best = std::max(best, golden_max(f, a, b).second);
    }
    return best;
}

/// Least-squares line y = a + b x; returns (a, b).
inline std::pair<double, double> fit_line(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, "fit_line needs >= 2 paired points");
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    require(den != 0.0, "fit_line: degenerate abscissae");
    const double b = (n * sxy - sx * sy) / den;
    return {(sy - b * sx) / n, b};
}

}  // namespace magbern
