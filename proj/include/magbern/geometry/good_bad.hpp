#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "magbern/algebra/comm_poly.hpp"
#include "magbern/core/errors.hpp"
#include "magbern/geometry/covering.hpp"
#include "magbern/landau/bernstein.hpp"

namespace magbern::geometry {

struct RectangleLabel {
    bool good = true;
    /// ‖f‖^2 on the rectangle.
    double mass = 0.0;
    /// max over tested (m, α) of ‖∂^α|f|^2‖_{L1(Q)} / (4^{m+1} C'_B(m) ‖f‖^2_{L2(Q)}).
    double worst_ratio = 0.0;
    /// First violating order and the number of 1s in α, or -1 when good.
    int fail_m = -1;
    int fail_j = -1;
};

struct GoodBadReport {
    std::vector<RectangleLabel> labels;
    double good_mass = 0.0;
    double total_mass = 0.0;  // ‖f‖^2 on the grid
    int m_max = 0;
    std::string warning;

    [[nodiscard]] double good_fraction() const { return total_mass > 0.0 ? good_mass / total_mass : 1.0; }
    [[nodiscard]] int good_count() const {
        int n = 0;
        for (const auto& l : labels) n += l.good ? 1 : 0;
        return n;
    }
};

struct GoodBadOptions {
    int m_max = 4;
    landau::DerivativeMethod method = landau::DerivativeMethod::closed_form;
    /// Wrap finite differences (torus fields).
    bool periodic = false;
};

/// Labels each rectangle of the covering by testing
///   ‖∂^α|f|^2‖_{L1(Q)} <= 4^{m+1} C'_B(m) ‖f‖^2_{L2(Q)}
/// for 1 <= m <= m_max (m = 0 holds trivially). Grid nodes x are assigned
/// to Q when x lies in the half-open rectangle.
inline GoodBadReport classify_good_bad(const landau::GridField& f, const Covering& cover, double E, double B,
                                       const GoodBadOptions& opt = {}) {
    require(opt.m_max >= 1, "m_max must be at least 1");
    require(E > 0.0 && B > 0.0, "classification needs E > 0 and B > 0");
    const auto& g = f.geometry();
    const double cell = g.cell_area();

    // Node index ranges per rectangle along each axis.
    struct Range {
        int lo;
        int hi;
    };
    auto nodes = [](double a, double w, double origin, double h, int n) {
        const double eps = 1e-9 * h;
        int lo = static_cast<int>(std::ceil((a - origin - eps) / h));
        int hi = static_cast<int>(std::ceil((a + w - origin - eps) / h));
        return Range{std::clamp(lo, 0, n), std::clamp(hi, 0, n)};
    };
    std::vector<Range> r1;
    std::vector<Range> r2;
    for (const auto& q : cover.rects) {
        r1.push_back(nodes(q.x0, q.w, g.x0, g.h1, g.n1));
        r2.push_back(nodes(q.y0, q.h, g.y0, g.h2, g.n2));
    }
    auto rect_sum = [&](std::size_t q, auto&& value) {
        double s = 0.0;
        for (int i1 = r1[q].lo; i1 < r1[q].hi; ++i1)
            for (int i2 = r2[q].lo; i2 < r2[q].hi; ++i2) s += value(g.index(i1, i2));
        return s * cell;
    };

    GoodBadReport rep;
    rep.m_max = opt.m_max;
    rep.total_mass = f.norm2();
    rep.labels.resize(cover.rects.size());
    for (std::size_t q = 0; q < cover.rects.size(); ++q)
        rep.labels[q].mass = rect_sum(q, [&](std::size_t i) { return std::norm(f.data()[i]); });

    for (int m = 1; m <= opt.m_max; ++m) {
        const double bound =
            std::pow(4.0, m + 1) * algebra::bernstein_constant(m, E, B, algebra::BernsteinVariant::L1);
        const auto d = landau::mod2_derivatives(f, m, B, opt.method, opt.periodic);
        for (int j = 0; j <= m; ++j) {
            const auto& dj = d[static_cast<std::size_t>(j)].data();
            for (std::size_t q = 0; q < cover.rects.size(); ++q) {
                auto& lab = rep.labels[q];
                const double lhs = rect_sum(q, [&](std::size_t i) { return std::abs(dj[i]); });
                const double rhs = bound * lab.mass;
                const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? INFINITY : 0.0);
                lab.worst_ratio = std::max(lab.worst_ratio, ratio);
                if (lab.good && lhs > rhs) {
                    lab.good = false;
                    lab.fail_m = m;
                    lab.fail_j = j;
                }
            }
        }
    }
    for (const auto& l : rep.labels)
        if (l.good) rep.good_mass += l.mass;
    rep.warning = "orders above m_max = " + std::to_string(opt.m_max) +
                  " were not tested; 'good' is a necessary-condition verdict only";
    return rep;
}

}  // namespace magbern::geometry
