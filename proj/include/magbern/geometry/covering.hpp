#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "magbern/core/errors.hpp"
#include "magbern/geometry/thickness.hpp"

namespace magbern::geometry {

/// Axis-parallel rectangle [x0, x0 + w) x [y0, y0 + h).
struct Rect {
    double x0 = 0.0;
    double y0 = 0.0;
    double w = 1.0;
    double h = 1.0;

    [[nodiscard]] bool contains(double x, double y) const { return x >= x0 && x < x0 + w && y >= y0 && y < y0 + h; }
    [[nodiscard]] double area() const { return w * h; }
};

struct Covering {
    Rect domain;
    std::vector<Rect> rects;
    int count1 = 0;
    int count2 = 0;
    /// Largest number of rectangles sharing an interior point.
    int overlap_bound = 1;
};

namespace detail {

/// Left ends of the 1-D cover of [0, L) by n = ceil(L/ℓ) intervals; the
/// last one is pulled back to end at L.
inline std::vector<double> cover_offsets(double L, double l) {
    const double eps = 1e-12 * std::max(1.0, L / l);
    const int n = std::max(1, static_cast<int>(std::ceil(L / l - eps)));
    std::vector<double> off(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) off[static_cast<std::size_t>(j)] = std::min(j * l, L - l);
    return off;
}

}  // namespace detail

inline Covering build_covering(const Rect& domain, Window l) {
    require(l.l1 > 0.0 && l.l2 > 0.0, "window sides must be positive");
    require(l.l1 <= domain.w * (1 + 1e-12) && l.l2 <= domain.h * (1 + 1e-12), "window must not exceed the domain");
    const auto o1 = detail::cover_offsets(domain.w, l.l1);
    const auto o2 = detail::cover_offsets(domain.h, l.l2);
    Covering c;
    c.domain = domain;
    c.count1 = static_cast<int>(o1.size());
    c.count2 = static_cast<int>(o2.size());
    for (double a : o1)
        for (double b : o2) c.rects.push_back({domain.x0 + a, domain.y0 + b, l.l1, l.l2});
    // A shifted last interval overlaps only its neighbour, so each axis
    // contributes multiplicity at most 2.
    auto mult = [](const std::vector<double>& o, double len) {
        return (o.size() >= 2 && o.back() < o[o.size() - 2] + len - 1e-12 * len) ? 2 : 1;
    };
    c.overlap_bound = mult(o1, l.l1) * mult(o2, l.l2);
    return c;
}

/// Number of rectangles containing (x, y).
inline int coverage_at(const Covering& c, double x, double y) {
    int n = 0;
    for (const auto& r : c.rects) n += r.contains(x, y) ? 1 : 0;
    return n;
}

struct CoverageAudit {
    int min_count = 0;
    int max_count = 0;
};

/// Coverage counts on a `samples` x `samples` grid of cell midpoints.
inline CoverageAudit audit_covering(const Covering& c, int samples) {
    require(samples >= 1, "audit needs at least one sample per axis");
    CoverageAudit a{1 << 30, 0};
    for (int i = 0; i < samples; ++i)
        for (int j = 0; j < samples; ++j) {
            const double x = c.domain.x0 + (i + 0.5) * c.domain.w / samples;
            const double y = c.domain.y0 + (j + 0.5) * c.domain.h / samples;
            const int n = coverage_at(c, x, y);
            a.min_count = std::min(a.min_count, n);
            a.max_count = std::max(a.max_count, n);
        }
    return a;
}

}  // namespace magbern::geometry
