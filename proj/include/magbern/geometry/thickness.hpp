#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <thread>
#include <utility>
#include <vector>

#include "magbern/core/errors.hpp"
#include "magbern/geometry/mask.hpp"

namespace magbern::geometry {

/// Window side lengths (ℓ1, ℓ2) in physical units.
struct Window {
    double l1 = 1.0;
    double l2 = 1.0;
};

struct ThicknessReport {
    double l1 = 0.0;
    double l2 = 0.0;
    /// vol(S ∩ Q) >= rho_lower vol(Q) for every ℓ-rectangle Q in the domain
    /// (in the plane, for periodic masks).
    double rho_lower = 0.0;
    /// Exact minimum density over grid-anchored windows of round(ℓ/h) cells.
    double rho_grid = 0.0;
    /// Lower-left corner of a window attaining rho_lower.
    double anchor_x = 0.0;
    double anchor_y = 0.0;
    int cells1 = 0;
    int cells2 = 0;

    static void write_csv_header(std::ostream& os) { os << "l1,l2,rho_lower,anchor_x,anchor_y\n"; }
    void write_csv_row(std::ostream& os) const {
        os.precision(17);
        os << l1 << ',' << l2 << ',' << rho_lower << ',' << anchor_x << ',' << anchor_y << '\n';
    }
};

namespace detail {

/// Summed-area table over the mask, extended by `e1` x `e2` wrapped cells
/// when periodic so that every window is a single rectangle lookup.
class PrefixSums {
public:
    PrefixSums(const SetMask& m, int e1, int e2) : w1_(m.n1() + e1), w2_(m.n2() + e2) {
        p_.assign(static_cast<std::size_t>(w1_ + 1) * static_cast<std::size_t>(w2_ + 1), 0);
        for (int i1 = 0; i1 < w1_; ++i1)
            for (int i2 = 0; i2 < w2_; ++i2) {
                const std::int64_t v = m.at(i1 % m.n1(), i2 % m.n2()) ? 1 : 0;
                ref(i1 + 1, i2 + 1) = v + ref(i1, i2 + 1) + ref(i1 + 1, i2) - ref(i1, i2);
            }
    }
    /// Number of set cells in [a1, a1 + k1) x [a2, a2 + k2).
    [[nodiscard]] std::int64_t window(int a1, int a2, int k1, int k2) const {
        return get(a1 + k1, a2 + k2) - get(a1, a2 + k2) - get(a1 + k1, a2) + get(a1, a2);
    }

private:
    std::int64_t& ref(int i, int j) { return p_[static_cast<std::size_t>(i) * (w2_ + 1) + static_cast<std::size_t>(j)]; }
    [[nodiscard]] std::int64_t get(int i, int j) const {
        return p_[static_cast<std::size_t>(i) * (w2_ + 1) + static_cast<std::size_t>(j)];
    }
    int w1_;
    int w2_;
    std::vector<std::int64_t> p_;
};

struct ArgMin {
    double value = std::numeric_limits<double>::infinity();
    int a1 = 0;
    int a2 = 0;
};

/// Minimum of fn(a1, a2) over [lo1, hi1) x [lo2, hi2). Rows of anchors are
/// split into fixed tiles, one per thread; ties go to the smallest anchor
/// in (a1, a2) order so the result does not depend on scheduling.
template <class Fn>
ArgMin parallel_min(int lo1, int hi1, int lo2, int hi2, Fn&& fn, unsigned threads) {
    ArgMin best;
    if (hi1 <= lo1 || hi2 <= lo2) return best;
    const int span = hi1 - lo1;
    if (threads == 0) threads = std::max(1U, std::min(8U, std::thread::hardware_concurrency()));
    threads = std::min<unsigned>(threads, static_cast<unsigned>(span));
    std::vector<ArgMin> partial(threads);
    auto work = [&](unsigned t) {
        const int a = lo1 + static_cast<int>(static_cast<long long>(span) * t / threads);
        const int b = lo1 + static_cast<int>(static_cast<long long>(span) * (t + 1) / threads);
        ArgMin loc;
        for (int a1 = a; a1 < b; ++a1)
            for (int a2 = lo2; a2 < hi2; ++a2) {
                const double v = fn(a1, a2);
                if (v < loc.value) loc = {v, a1, a2};
            }
        partial[t] = loc;
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work, t);
    work(0);
    for (auto& th : pool) th.join();
    for (const auto& p : partial)
        if (p.value < best.value) best = p;  // tiles are in a1 order
    return best;
}

/// Set-cell count of the k1 x k2 window at (a1, a2); anchors may be
/// negative or run past the grid on periodic masks.
class WindowCounter {
public:
    WindowCounter(const SetMask& m, int ext) : m_(m), ps_(m, m.periodic() ? ext : 0, m.periodic() ? ext : 0) {}
    [[nodiscard]] std::int64_t operator()(int a1, int a2, int k1, int k2) const {
        if (k1 <= 0 || k2 <= 0) return 0;
        if (m_.periodic()) {
            a1 = ((a1 % m_.n1()) + m_.n1()) % m_.n1();
            a2 = ((a2 % m_.n2()) + m_.n2()) % m_.n2();
        }
        return ps_.window(a1, a2, k1, k2);
    }

private:
    const SetMask& m_;
    PrefixSums ps_;
};

}  // namespace detail

/// Thickness of S at scale ℓ.
///
/// rho_grid is the exact minimum over windows of round(ℓ/h) whole cells.
/// rho_lower is the minimum over all real positions of Q. Writing
/// ℓ = (n + f) h per axis, vol(S ∩ Q) is bilinear in the sub-cell shifts
/// between the points where an edge of Q meets a grid line, so the
/// minimum is attained with each axis either left-aligned (n whole cells,
/// then a fraction f) or right-aligned (a fraction f, then n whole cells).
inline ThicknessReport thickness_scan(const SetMask& mask, Window l, unsigned threads = 0) {
    const double L1 = mask.n1() * mask.h1();
    const double L2 = mask.n2() * mask.h2();
    const double eps = 1e-9;
    require(l.l1 > 0.0 && l.l2 > 0.0, "window sides must be positive");
    require(l.l1 <= L1 * (1 + eps) && l.l2 <= L2 * (1 + eps), "window must not exceed the domain");
    const double r1 = std::min(l.l1 / mask.h1(), static_cast<double>(mask.n1()));
    const double r2 = std::min(l.l2 / mask.h2(), static_cast<double>(mask.n2()));
    require(r1 >= 2.0 - eps && r2 >= 2.0 - eps, "window must span at least 2 cells per axis");

    ThicknessReport rep;
    rep.l1 = l.l1;
    rep.l2 = l.l2;
    rep.cells1 = std::clamp(static_cast<int>(std::lround(r1)), 1, mask.n1());
    rep.cells2 = std::clamp(static_cast<int>(std::lround(r2)), 1, mask.n2());
    const detail::WindowCounter count(mask, std::max(mask.n1(), mask.n2()) + 2);
    const bool per = mask.periodic();

    {
        const int k1 = rep.cells1;
        const int k2 = rep.cells2;
        const auto g = detail::parallel_min(
            0, per ? mask.n1() : mask.n1() - k1 + 1, 0, per ? mask.n2() : mask.n2() - k2 + 1,
            [&](int a1, int a2) { return static_cast<double>(count(a1, a2, k1, k2)); }, threads);
        rep.rho_grid = g.value / (static_cast<double>(k1) * k2);
    }

    // Per axis: n whole cells starting at c, plus a fraction f of cell
    // c + n (left-aligned) or c - 1 (right-aligned).
    struct Axis {
        int n;
        double f;
    };
    auto split = [&](double r) {
        int n = static_cast<int>(std::floor(r + eps));
        double f = r - n;
        if (f < eps) f = 0.0;
        return Axis{n, f};
    };
    const Axis x = split(r1);
    const Axis y = split(r2);
    const double area = r1 * r2;  // in cells
    detail::ArgMin best;
    bool best_right1 = false;
    bool best_right2 = false;
    for (int s1 = 0; s1 < (x.f > 0.0 ? 2 : 1); ++s1)
        for (int s2 = 0; s2 < (y.f > 0.0 ? 2 : 1); ++s2) {
            const int p1 = s1 ? -1 : x.n;  // offset of the fractional cell
            const int p2 = s2 ? -1 : y.n;
            auto range = [&](const Axis& a, int s, int n_cells) {
                if (per) return std::pair{0, n_cells};
                const int lo = (s && a.f > 0.0) ? 1 : 0;
                const int hi = n_cells - a.n - ((!s && a.f > 0.0) ? 1 : 0) + 1;
                return std::pair{lo, hi};
            };
            const auto [lo1, hi1] = range(x, s1, mask.n1());
            const auto [lo2, hi2] = range(y, s2, mask.n2());
            const auto m = detail::parallel_min(
                lo1, hi1, lo2, hi2,
                [&](int c1, int c2) {
                    double v = static_cast<double>(count(c1, c2, x.n, y.n));
                    if (x.f > 0.0) v += x.f * static_cast<double>(count(c1 + p1, c2, 1, y.n));
                    if (y.f > 0.0) v += y.f * static_cast<double>(count(c1, c2 + p2, x.n, 1));
                    if (x.f > 0.0 && y.f > 0.0) v += x.f * y.f * static_cast<double>(count(c1 + p1, c2 + p2, 1, 1));
                    return v / area;
                },
                threads);
            if (m.value < best.value) {
                best = m;
                best_right1 = s1 != 0;
                best_right2 = s2 != 0;
            }
        }
    rep.rho_lower = std::clamp(best.value, 0.0, 1.0);
    rep.anchor_x = mask.x0() + (best.a1 - (best_right1 ? x.f : 0.0)) * mask.h1();
    rep.anchor_y = mask.y0() + (best.a2 - (best_right2 ? y.f : 0.0)) * mask.h2();
    return rep;
}

}  // namespace magbern::geometry
