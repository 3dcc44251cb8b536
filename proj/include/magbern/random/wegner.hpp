#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <thread>
#include <vector>

#include "magbern/core/errors.hpp"
#include "magbern/core/numerics.hpp"
#include "magbern/core/rng.hpp"
#include "magbern/geometry/mask.hpp"
#include "magbern/geometry/thickness.hpp"
#include "magbern/lattice/eigensolve.hpp"
#include "magbern/lattice/torus.hpp"

namespace magbern::random {

/// Uniform coupling law on [m0, M0].
struct UniformLaw {
    double m0 = 0.0;
    double M0 = 1.0;
};

/// s(ε) = sup_E P[ω ∈ [E, E + ε]].
inline double modulus_of_continuity(const UniformLaw& law, double eps) {
    require(eps > 0.0, "epsilon must be positive");
    require(law.m0 < law.M0, "coupling law needs m0 < M0");
    return std::min(eps / (law.M0 - law.m0), 1.0);
}

/// Smith-Volterra-Cantor set on [0, 1] after `depth` removal steps: step n
/// takes an open middle interval of length 4^-n out of each of the 2^(n-1)
/// remaining pieces.
inline bool fat_cantor_contains(double t, int depth) {
    if (t < 0.0 || t > 1.0) return false;
    double a = 0.0;
    double b = 1.0;
    double gap = 0.25;
    for (int n = 1; n <= depth; ++n, gap *= 0.25) {
        const double c = 0.5 * (a + b);
        if (std::abs(t - c) < 0.5 * gap) return false;
        if (t < c)
            b = c - 0.5 * gap;
        else
            a = c + 0.5 * gap;
    }
    return true;
}

/// Single-site bump u(x - j): the indicator of (C x C) ∩ {|x - j| <= radius},
/// with C a fat Cantor set placed on the unit cell around j. `full` gives
/// u ≡ 1 on the whole cell instead.
struct SiteProfile {
    double radius = 0.5;
    int cantor_depth = 3;
    bool full = false;

    [[nodiscard]] bool contains(double d1, double d2) const {
        if (full) return true;
        if (std::hypot(d1, d2) > radius) return false;
        return fat_cantor_contains(d1 + 0.5, cantor_depth) && fat_cantor_contains(d2 + 0.5, cantor_depth);
    }
};

/// Random Landau Hamiltonian on a flux-quantized torus with one coupling
/// per integer site. Each grid node belongs to its nearest site, so the
/// bumps have disjoint supports and 0 <= Σ u_j <= 1.
struct EnsembleConfig {
    lattice::TorusSetup setup;
    SiteProfile profile;
    UniformLaw law;
    std::uint64_t master_seed = 1;
    /// Window used to certify that Σ u_j is positive on a thick set.
    double thick_window = 1.0;

    [[nodiscard]] int sites1() const { return static_cast<int>(std::lround(setup.L1)); }
    [[nodiscard]] int sites2() const { return static_cast<int>(std::lround(setup.L2)); }
    [[nodiscard]] int site_count() const { return sites1() * sites2(); }

    /// Site owning grid node (i1, i2).
    [[nodiscard]] int site_of(int i1, int i2) const {
        const int j1 = static_cast<int>(std::lround(i1 * setup.h1())) % sites1();
        const int j2 = static_cast<int>(std::lround(i2 * setup.h2())) % sites2();
        return j1 * sites2() + j2;
    }

    /// Support of Σ u_j.
    [[nodiscard]] geometry::SetMask support() const {
        geometry::SetMask m(setup.N1, setup.N2, setup.h1(), setup.h2(), true);
        for (int i1 = 0; i1 < setup.N1; ++i1)
            for (int i2 = 0; i2 < setup.N2; ++i2) {
                const double x1 = i1 * setup.h1();
                const double x2 = i2 * setup.h2();
                m.set(i1, i2, profile.contains(x1 - std::round(x1), x2 - std::round(x2)));
            }
        return m;
    }

    void validate() const {
        lattice::validate(setup);
        require(law.m0 < law.M0, "coupling law needs m0 < M0");
        require(std::abs(setup.L1 - sites1()) < 1e-9 && std::abs(setup.L2 - sites2()) < 1e-9 && sites1() >= 1 &&
                    sites2() >= 1,
                "box sides must be integers so that the site lattice tiles the torus");
        require(profile.full || (profile.radius > 0.0 && profile.cantor_depth >= 0), "bad single-site profile");
        const auto rep = geometry::thickness_scan(support(), {thick_window, thick_window});
        require(rep.rho_lower > 0.0, "sum of single-site bumps is not positive on a thick set");
    }
};

/// Couplings ω_j for one trial. Each site draws from its own child stream,
/// so the values do not depend on evaluation order.
inline std::vector<double> sample_couplings(const EnsembleConfig& c, std::uint64_t trial) {
    const SplitStream t = SplitStream(c.master_seed).split(trial);
    std::vector<double> w(static_cast<std::size_t>(c.site_count()));
    for (int j = 0; j < c.site_count(); ++j) {
        SplitStream s = t.split(static_cast<std::uint64_t>(j));
        w[static_cast<std::size_t>(j)] = s.uniform(c.law.m0, c.law.M0);
    }
    return w;
}

/// V_ω at the grid nodes for given couplings.
inline std::vector<double> potential(const EnsembleConfig& c, const std::vector<double>& omega) {
    require(static_cast<int>(omega.size()) == c.site_count(), "one coupling per site required");
    const auto supp = c.support();
    std::vector<double> v(static_cast<std::size_t>(c.setup.size()), 0.0);
    for (int i1 = 0; i1 < c.setup.N1; ++i1)
        for (int i2 = 0; i2 < c.setup.N2; ++i2)
            if (supp.at(i1, i2))
                v[static_cast<std::size_t>(c.setup.index(i1, i2))] =
                    omega[static_cast<std::size_t>(c.site_of(i1, i2))];
    return v;
}

inline lattice::MagneticOperator sample_operator(const EnsembleConfig& c, std::uint64_t trial) {
    return lattice::assemble(c.setup, potential(c, sample_couplings(c, trial)));
}

/// All eigenvalues, ascending (dense).
inline Eigen::VectorXd dense_spectrum(const lattice::MagneticOperator& op) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Eigen::MatrixXcd(op.H), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigenvalue solve failed");
    return es.eigenvalues();
}

/// #{λ ∈ [E - ε, E + ε]} for an ascending spectrum.
inline int count_window(const Eigen::VectorXd& sorted, double E, double eps) {
    const double* b = sorted.data();
    const double* e = b + sorted.size();
    return static_cast<int>(std::upper_bound(b, e, E + eps) - std::lower_bound(b, e, E - eps));
}

inline int eigen_count_window(const lattice::MagneticOperator& op, double E, double eps) {
    require(eps >= 0.0, "epsilon must be non-negative");
    require(E + eps <= 0.1 / std::pow(std::min(op.setup.h1(), op.setup.h2()), 2),
            "window leaves the band the grid resolves");
    return count_window(dense_spectrum(op), E, eps);
}

struct WegnerOptions {
    int bootstrap = 1000;
    int threads = 0;  // 0: hardware concurrency
};

struct WegnerStats {
    double L = 0.0;  // L1 (the CSV's box size)
    double area = 0.0;
    double E = 0.0;
    std::vector<double> eps;
    int trials = 0;
    std::vector<std::vector<int>> counts;  // [trial][eps]
    std::vector<double> mean;
    std::vector<double> stderr_;
    std::vector<double> s2eps;
    std::vector<double> ratio;     // mean / (s(2ε) L1 L2)
    std::vector<double> ratio_hi;  // bootstrap 97.5% quantile of the ratio
    double slope = 0.0;            // least-squares slope of mean vs s(2ε), through the origin
    double slope_lo = 0.0;         // bootstrap 95% band
    double slope_hi = 0.0;
    double half_slope = 0.0;       // slope on the smaller half of the ε grid
    double slope_diff_lo = 0.0;    // bootstrap 95% band of half_slope - slope
    double slope_diff_hi = 0.0;
    double c_w = 0.0;              // max over ε of ratio_hi

    [[nodiscard]] bool linear() const { return slope_diff_lo <= 0.0 && 0.0 <= slope_diff_hi; }
    [[nodiscard]] double ratio_spread() const {
        const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
        return *lo > 0.0 ? *hi / *lo : INFINITY;
    }

    static void write_csv_header(std::ostream& os) { os << "L,E,eps,mean_count,stderr,s2eps,ratio\n"; }
    void write_csv(std::ostream& os) const {
        os.precision(12);
        for (std::size_t k = 0; k < eps.size(); ++k)
            os << L << ',' << E << ',' << eps[k] << ',' << mean[k] << ',' << stderr_[k] << ',' << s2eps[k] << ','
               << ratio[k] << '\n';
    }
};

namespace detail {

inline double origin_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t n) {
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sxy += x[k] * y[k];
        sxx += x[k] * x[k];
    }
    return sxy / sxx;
}

inline double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double f = pos - static_cast<double>(i);
    return i + 1 < v.size() ? v[i] * (1.0 - f) + v[i + 1] * f : v[i];
}

}  // namespace detail

/// Monte Carlo estimate of E[Tr 1_[E-ε, E+ε](H_ω)] over `trials` samples.
/// Trial t always uses the stream split(t) of the master seed, so the
/// result does not depend on the thread count.
inline WegnerStats wegner_sweep(const EnsembleConfig& c, double E, std::vector<double> eps, int trials,
                                const WegnerOptions& opt = {}) {
    c.validate();
    require(!eps.empty(), "need at least one epsilon");
    require(trials >= 2, "need at least two trials");
    std::sort(eps.begin(), eps.end());
    for (double e : eps) require(e > 0.0, "epsilon must be positive");
    require(E + eps.back() <= 0.1 / std::pow(std::min(c.setup.h1(), c.setup.h2()), 2),
            "window leaves the band the grid resolves");

    WegnerStats st;
    st.L = c.setup.L1;
    st.area = c.setup.L1 * c.setup.L2;
    st.E = E;
    st.eps = eps;
    st.trials = trials;
    st.counts.assign(static_cast<std::size_t>(trials), std::vector<int>(eps.size(), 0));

    int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, trials);
    {
        std::vector<std::jthread> pool;
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (int t = w; t < trials; t += threads) {
                    const Eigen::VectorXd spec = dense_spectrum(sample_operator(c, static_cast<std::uint64_t>(t)));
                    for (std::size_t k = 0; k < eps.size(); ++k)
                        st.counts[static_cast<std::size_t>(t)][k] = count_window(spec, E, eps[k]);
                }
            });
    }

    const std::size_t ne = eps.size();
    auto stats_of = [&](const std::vector<int>& pick, std::vector<double>& mean) {
        mean.assign(ne, 0.0);
        std::vector<long long> sum(ne, 0);  // exact integer aggregation
        for (int t : pick)
            for (std::size_t k = 0; k < ne; ++k) sum[k] += st.counts[static_cast<std::size_t>(t)][k];
        for (std::size_t k = 0; k < ne; ++k) mean[k] = static_cast<double>(sum[k]) / static_cast<double>(pick.size());
    };
    std::vector<int> all(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) all[static_cast<std::size_t>(t)] = t;
    stats_of(all, st.mean);

    st.stderr_.assign(ne, 0.0);
    for (std::size_t k = 0; k < ne; ++k) {
        double ss = 0.0;
        for (const auto& row : st.counts) ss += (row[k] - st.mean[k]) * (row[k] - st.mean[k]);
        st.stderr_[k] = std::sqrt(ss / (trials - 1.0) / trials);
        st.s2eps.push_back(modulus_of_continuity(c.law, 2.0 * eps[k]));
        st.ratio.push_back(st.mean[k] / (st.s2eps[k] * st.area));
    }
    const std::size_t half = std::max<std::size_t>(1, (ne + 1) / 2);
    st.slope = detail::origin_slope(st.s2eps, st.mean, ne);
    st.half_slope = detail::origin_slope(st.s2eps, st.mean, half);

    SplitStream boot = SplitStream(c.master_seed).split(0xb007ULL);
    std::vector<double> slopes;
    std::vector<double> diffs;
    std::vector<std::vector<double>> ratios(ne);
    std::vector<int> pick(static_cast<std::size_t>(trials));
    std::vector<double> mean;
    for (int b = 0; b < opt.bootstrap; ++b) {
        for (auto& p : pick) p = static_cast<int>(boot.next_u64() % static_cast<std::uint64_t>(trials));
        stats_of(pick, mean);
        const double s = detail::origin_slope(st.s2eps, mean, ne);
        slopes.push_back(s);
        diffs.push_back(detail::origin_slope(st.s2eps, mean, half) - s);
        for (std::size_t k = 0; k < ne; ++k) ratios[k].push_back(mean[k] / (st.s2eps[k] * st.area));
    }
    if (opt.bootstrap > 0) {
        st.slope_lo = detail::quantile(slopes, 0.025);
        st.slope_hi = detail::quantile(slopes, 0.975);
        st.slope_diff_lo = detail::quantile(diffs, 0.025);
        st.slope_diff_hi = detail::quantile(diffs, 0.975);
        for (std::size_t k = 0; k < ne; ++k) st.ratio_hi.push_back(detail::quantile(ratios[k], 0.975));
        st.c_w = *std::max_element(st.ratio_hi.begin(), st.ratio_hi.end());
    }
    return st;
}

/// Exponent a in mean ~ L^a from a log-log fit across box sizes, using the
/// total count over the ε grid (the grids must match).
struct BoxScaling {
    double exponent = 0.0;
    std::vector<double> per_eps;  // exponent fitted at each ε separately
};

inline BoxScaling box_scaling(const std::vector<WegnerStats>& runs) {
    require(runs.size() >= 2, "box scaling needs at least two box sizes");
    for (const auto& r : runs) require(r.eps == runs.front().eps, "box scaling needs a common epsilon grid");
    std::vector<double> lx;
    std::vector<double> ly;
    for (const auto& r : runs) {
        double total = 0.0;
        for (double m : r.mean) total += m;
        require(total > 0.0, "no eigenvalues counted in any window");
        lx.push_back(std::log(r.L));
        ly.push_back(std::log(total));
    }
    BoxScaling s;
    s.exponent = fit_line(lx, ly).second;
    for (std::size_t k = 0; k < runs.front().eps.size(); ++k) {
        std::vector<double> y;
        for (const auto& r : runs) y.push_back(std::log(std::max(r.mean[k], 1e-300)));
        s.per_eps.push_back(fit_line(lx, y).second);
    }
    return s;
}

}  // namespace magbern::random
