#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "magbern/algebra/comm_poly.hpp"
#include "magbern/cli/config.hpp"
#include "magbern/control/heat.hpp"
#include "magbern/core/errors.hpp"
#include "magbern/core/rng.hpp"
#include "magbern/geometry/mask.hpp"
#include "magbern/geometry/thickness.hpp"
#include "magbern/inequality/empirical.hpp"
#include "magbern/inequality/remez.hpp"
#include "magbern/landau/bernstein.hpp"
#include "magbern/landau/sample.hpp"
#include "magbern/lattice/eigensolve.hpp"
#include "magbern/random/wegner.hpp"

namespace magbern::cli {

namespace detail {

class Bundle {
public:
    Bundle(const RunConfig& c, std::ostream& out) : cfg_(c), out_(out), dir_(c.out_dir()) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw ResourceError("cannot create output directory '" + dir_.string() + "': " + ec.message());
        std::ostringstream m;
        write_manifest(c, m);
        write(c.command + ".manifest", m.str());
    }

    void write(const std::string& name, const std::string& body) const {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw ResourceError("cannot write '" + (dir_ / name).string() + "'");
        f << body;
    }
    /// CSV goes both to <out>/<command>.csv and to the console.
    void csv(const std::string& body) const {
        write(cfg_.command + ".csv", body);
        out_ << body;
    }

private:
    const RunConfig& cfg_;
    std::ostream& out_;
    std::filesystem::path dir_;
};

inline geometry::SetMask load_mask(const std::string& path, double h1, double h2, bool periodic) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open mask '" + path + "'");
    return geometry::SetMask::read_pbm(in, h1, h2, periodic);
}

inline std::string plot_pair(double x, double y) {
    std::ostringstream s;
    s.precision(12);
    s << x << ' ' << y << '\n';
    return s.str();
}

/// Window from --l, or a quarter of the box.
inline geometry::Window window_of(const RunConfig& c, double L1, double L2) {
    if (!c.is_set("l")) return {0.25 * L1, 0.25 * L2};
    const auto l = c.list("l");
    return {l[0], l[1]};
}

/// Certified density of the mask, or the requested one if it does not
/// exceed the certificate.
inline double density_of(const RunConfig& c, const geometry::ThicknessReport& rep) {
    if (!(rep.rho_lower > 0.0))
        throw ValidationError("mask is not thick at window " + std::to_string(rep.l1) + " x " + std::to_string(rep.l2));
    if (!c.is_set("rho")) return rep.rho_lower;
    const double rho = c.real("rho");
    if (rho > rep.rho_lower * (1.0 + 1e-12))
        throw ValidationError("rho = " + c.raw("rho") + " exceeds the certified density " +
                              std::to_string(rep.rho_lower));
    return rho;
}

inline int run_fm(const RunConfig& c, const Bundle& b, std::ostream& out) {
    const int m = static_cast<int>(c.integer("m"));
    if (m > 200) throw ResourceError("m above 200 is outside the supported range");
    const std::string s = algebra::f_poly(m).str();
    b.write("fm.txt", s + "\n");
    out << s << '\n';
    return 0;
}

inline int run_weyl(const RunConfig& c, const Bundle& b) {
    std::ostringstream csv;
    csv << "check,argument,result,detail\n";
    bool ok = true;
    for (int m = 1; m <= c.integer("m_max"); ++m) {
        const bool r = algebra::verify_recursion(m);
        ok = ok && r;
        csv << "recursion," << m << ',' << (r ? "true" : "false") << ",\n";
    }
    const auto f = c.list("b");
    if (f.size() != 3) throw ValidationError("'b' must have three components, got " + c.raw("b"));
    const int power = static_cast<int>(c.integer("power"));
    const auto res = algebra::weyl3d_counterexample(mpq_class(f[0]), mpq_class(f[1]), mpq_class(f[2]), power);
    csv << "weyl3d," << f[0] << ';' << f[1] << ';' << f[2] << ";power=" << power << ','
        << (res.counterexample ? "true" : "false") << ",coefficients=";
    for (std::size_t k = 0; k < res.coefficients.size(); ++k) csv << (k ? ";" : "") << res.coefficients[k].str();
    if (res.witness) {
        const auto& w = *res.witness;
        csv << " witness=d1^" << w[0] << "*d2^" << w[1] << "*d3^" << w[2] << " coefficient="
            << res.residual.terms().at(w).str();
    }
    csv << '\n';
    b.csv(csv.str());
    return ok ? 0 : 1;
}

inline int run_bernstein(const RunConfig& c, const Bundle& b) {
    const double B = c.real("B");
    const double E = c.energy("E", B);
    require(E >= B, "E must be at least B");
    const int max_level = static_cast<int>(std::floor((E / B - 1.0) / 2.0 + 1e-12));
    const int m_max = static_cast<int>(c.integer("m_max"));
    const SplitStream root(c.seed());
    std::ostringstream csv;
    csv.precision(12);
    csv << "sample,m,norm2,bernstein_sum,spectral_value,bound_l2,l1_sum,bound_l1,pass\n";
    std::ostringstream plot;
    bool ok = true;
    for (int i = 0; i < c.integer("samples"); ++i) {
        SplitStream s = root.split(static_cast<std::uint64_t>(i));
        const auto f = landau::random_expansion(B, max_level, static_cast<int>(c.integer("terms")),
                                                c.real("center_radius"), s);
        const auto grid = landau::QuadratureSpec::defaults(B, f.center_radius()).grid();
        const auto g = f.form().sample(grid);
        const double n2 = g.norm2();
        for (int m = 1; m <= m_max; ++m) {
            const double bs = landau::bernstein_sum(g, m, B).value;
            const double sv = landau::spectral_form_value(f, m, grid);
            const double l1 = landau::l1_bernstein_sum(g, m, B).value;
            const double b2 = algebra::bernstein_constant(m, E, B, algebra::BernsteinVariant::L2) * n2;
            const double b1 = algebra::bernstein_constant(m, E, B, algebra::BernsteinVariant::L1) * n2;
            const bool pass = bs <= b2 * (1 + 1e-4) && std::abs(sv - bs) <= 1e-4 * bs && l1 <= b1 * (1 + 1e-3);
            ok = ok && pass;
            csv << i << ',' << m << ',' << n2 << ',' << bs << ',' << sv << ',' << b2 << ',' << l1 << ',' << b1 << ','
                << (pass ? 1 : 0) << '\n';
            if (m == m_max) plot << plot_pair(i, bs / b2);
        }
    }
    b.write("bernstein_ratio.dat", plot.str());
    b.csv(csv.str());
    return ok ? 0 : 1;
}

inline int run_thickness(const RunConfig& c, const Bundle& b) {
    const auto h = c.list("h");
    if (h.size() != 2 || !(h[0] > 0.0 && h[1] > 0.0)) throw ValidationError("'h' must be two positive numbers");
    const auto mask = load_mask(c.raw("mask"), h[0], h[1], c.boolean("periodic"));
    const auto l = c.list("l");
    const auto rep = geometry::thickness_scan(mask, {l[0], l[1]}, c.threads());
    std::ostringstream csv;
    geometry::ThicknessReport::write_csv_header(csv);
    rep.write_csv_row(csv);
    b.csv(csv.str());
    return 0;
}

/// Square torus holding nphi quanta on the mask's grid.
inline lattice::TorusSetup torus_for(double B, int nphi, int n1, int n2) {
    require(nphi >= 1, "nphi must be at least 1");
    const double L = std::sqrt(2.0 * std::numbers::pi * nphi / B);
    return {L, L, B, n1, n2};
}

inline void check_grid(const lattice::TorusSetup& s) {
    if (s.size() > 160 * 160) throw ResourceError("torus grid above 160 x 160 points is outside the desk-scale range");
}

inline int run_specineq(const RunConfig& c, const Bundle& b) {
    const double B = c.real("B");
    const double E = c.energy("E", B);
    const auto raw = load_mask(c.raw("mask"), 1.0, 1.0, true);
    const auto setup = torus_for(B, static_cast<int>(c.integer("nphi")), raw.n1(), raw.n2());
    check_grid(setup);
    const auto mask = load_mask(c.raw("mask"), setup.h1(), setup.h2(), true);
    const auto win = window_of(c, setup.L1, setup.L2);
    const auto rep = geometry::thickness_scan(mask, win, c.threads());
    const double rho = density_of(c, rep);
    lattice::EigenOptions opt;
    opt.tol = c.real("tol");
    opt.seed = c.seed();
    const auto sub = lattice::eigensolve(lattice::assemble(setup), lattice::Cutoff::by_energy(E), opt);
    const auto emp = inequality::empirical_constant(sub, mask);
    const auto cmp = inequality::compare_constants(E, B, win.l1, win.l2, rho, emp.constant);
    std::ostringstream csv;
    inequality::ConstantComparison::write_csv_header(csv);
    cmp.write_csv_row(csv);
    b.csv(csv.str());
    return cmp.pass ? 0 : 1;
}

inline inequality::IntervalSet random_intervals(SplitStream& s) {
    inequality::IntervalSet e;
    const int k = 1 + static_cast<int>(s.next_u64() % 3);
    for (int i = 0; i < k; ++i) {
        double a = s.uniform();
        double z = s.uniform();
        if (a > z) std::swap(a, z);
        if (z - a < 1e-3) z = std::min(1.0, a + 1e-3);
        e.parts.push_back({a, z});
    }
    return e;
}

inline int run_remez(const RunConfig& c, const Bundle& b) {
    const SplitStream root(c.seed());
    const int dmax = static_cast<int>(c.integer("degree_max"));
    std::ostringstream csv;
    csv.precision(12);
    csv << "trial,kind,degree,measure,sup_full,sup_set,bound,holds\n";
    bool ok = true;
    for (int i = 0; i < c.integer("trials"); ++i) {
        SplitStream s = root.split(static_cast<std::uint64_t>(i));
        const auto e = random_intervals(s);
        inequality::ComplexPoly p;
        const int d = static_cast<int>(s.next_u64() % static_cast<std::uint64_t>(dmax + 1));
        for (int k = 0; k <= d; ++k) p.coeffs.emplace_back(s.normal(), s.normal());
        const auto r = inequality::remez_check(p, e);
        ok = ok && r.holds;
        csv << i << ",remez," << p.degree() << ',' << e.measure() << ',' << r.sup_full << ',' << r.sup_set << ','
            << r.bound << ',' << (r.holds ? 1 : 0) << '\n';

        // φ(0) = 1 and coefficients shrinking like 4^-k keep M_φ moderate.
        inequality::AnalyticSample phi;
        phi.phi.coeffs.emplace_back(1.0, 0.0);
        double scale = 1.0;
        for (int k = 1; k <= d; ++k) {
            scale *= 0.25;
            phi.phi.coeffs.emplace_back(scale * s.normal(), scale * s.normal());
        }
        const auto kr = inequality::kovrijkine_check(phi, e);
        ok = ok && kr.sups.holds;
        csv << i << ",analytic," << phi.phi.degree() << ',' << e.measure() << ',' << kr.sups.sup_full << ','
            << kr.sups.sup_set << ',' << kr.sups.bound << ',' << (kr.sups.holds ? 1 : 0) << '\n';
    }
    b.csv(csv.str());
    return ok ? 0 : 1;
}

inline int run_control(const RunConfig& c, const Bundle& b) {
    const double B = c.real("B");
    const int nphi = static_cast<int>(c.integer("nphi"));
    lattice::TorusSetup setup;
    geometry::SetMask mask(4, 4, 1.0, 1.0, true);
    if (c.is_set("mask")) {
        const auto raw = load_mask(c.raw("mask"), 1.0, 1.0, true);
        setup = torus_for(B, nphi, raw.n1(), raw.n2());
        mask = load_mask(c.raw("mask"), setup.h1(), setup.h2(), true);
    } else {
        setup = lattice::TorusSetup::square(B, nphi, c.real("per_length"));
        const auto st = c.list("strip");
        if (st.size() != 2 || st[0] < 1 || st[1] <= st[0])
            throw ValidationError("'strip' must be width,period with 1 <= width < period");
        mask = geometry::strip_mask(setup.N1, setup.N2, setup.h1(), setup.h2(), static_cast<int>(st[0]),
                                    static_cast<int>(st[1]), true);
    }
    check_grid(setup);
    const auto win = window_of(c, setup.L1, setup.L2);
    const auto rep = geometry::thickness_scan(mask, win, c.threads());
    const double rho = density_of(c, rep);
    const double e_max = c.energy("E_max", B);
    lattice::EigenOptions opt;
    opt.tol = c.real("tol");
    opt.seed = c.seed();
    const auto sub = lattice::eigensolve(lattice::assemble(setup), lattice::Cutoff::by_energy(e_max), opt);

    std::ostringstream csv;
    control::ControlSweepRow::write_csv_header(csv);
    std::ostringstream plot;
    bool ok = true;
    for (double T : c.list("T")) {
        require(T > 0.0, "horizons must be positive");
        control::HeatProblem prob{&sub, &mask, T, Eigen::VectorXcd::Constant(sub.size(), 1.0 / std::sqrt(sub.size())),
                                  static_cast<int>(c.integer("nodes"))};
        const auto hum = control::hum_control(prob, c.real("hum_eps"));
        control::ControlSweepRow row{T,   rho,      win.l1, win.l2, B, e_max, hum.cost,
                                     control::cost_bound(rho, win.l1 + win.l2, B, T), hum.terminal_residual};
        ok = ok && Magnitude::from_value(hum.cost * hum.cost) <= row.bound_traced;
        row.write_csv_row(csv);
        plot << plot_pair(T, hum.cost);
    }
    b.write("control_cost.dat", plot.str());
    b.csv(csv.str());
    return ok ? 0 : 1;
}

inline int run_wegner(const RunConfig& c, const Bundle& b) {
    const double B = c.real("B");
    const double h = c.real("h");
    std::ostringstream csv;
    random::WegnerStats::write_csv_header(csv);
    std::ostringstream fit;
    fit.precision(12);
    fit << "L,slope,slope_lo,slope_hi,half_slope,linear,c_w,ratio_spread\n";
    std::vector<random::WegnerStats> runs;
    for (double L : c.list("L")) {
        const int n = static_cast<int>(std::lround(L / h));
        if (std::abs(n * h - L) > 1e-9 * L) throw ValidationError("L must be a multiple of h");
        if (n > 48) throw ResourceError("wegner grids above 48 x 48 are outside the dense desk-scale range");
        random::EnsembleConfig cfg;
        cfg.setup = {L, L, B, n, n};
        cfg.profile.radius = c.real("radius");
        cfg.profile.cantor_depth = static_cast<int>(c.integer("cantor_depth"));
        cfg.law = {c.real("m0"), c.real("M0")};
        cfg.master_seed = c.seed();
        random::WegnerOptions opt;
        opt.bootstrap = static_cast<int>(c.integer("bootstrap"));
        opt.threads = static_cast<int>(c.threads());
        auto st = random::wegner_sweep(cfg, c.energy("E", B), c.list("eps"), static_cast<int>(c.integer("trials")),
                                       opt);
        st.write_csv(csv);
        fit << st.L << ',' << st.slope << ',' << st.slope_lo << ',' << st.slope_hi << ',' << st.half_slope << ','
            << (st.linear() ? 1 : 0) << ',' << st.c_w << ',' << st.ratio_spread() << '\n';
        std::ostringstream plot;
        for (std::size_t k = 0; k < st.eps.size(); ++k) plot << plot_pair(st.eps[k], st.mean[k]);
        std::ostringstream name;
        name << "wegner_L" << st.L << ".dat";
        b.write(name.str(), plot.str());
        runs.push_back(std::move(st));
    }
    if (runs.size() >= 2) fit << "exponent," << random::box_scaling(runs).exponent << ",,,,,,\n";
    b.write("wegner_fit.csv", fit.str());
    b.csv(csv.str());
    return 0;
}

}  // namespace detail

/// Runs one command. Returns 0, or 1 when an inequality check came out
/// false; validation, numerical and resource failures throw.
inline int run(const RunConfig& c, std::ostream& out) {
    validate(c);
    const detail::Bundle b(c, out);
    if (c.command == "fm") return detail::run_fm(c, b, out);
    if (c.command == "weyl-verify") return detail::run_weyl(c, b);
    if (c.command == "bernstein") return detail::run_bernstein(c, b);
    if (c.command == "thickness") return detail::run_thickness(c, b);
    if (c.command == "specineq") return detail::run_specineq(c, b);
    if (c.command == "remez") return detail::run_remez(c, b);
    if (c.command == "control") return detail::run_control(c, b);
    if (c.command == "wegner") return detail::run_wegner(c, b);
    throw ValidationError("unknown command '" + c.command + "'");
}

}  // namespace magbern::cli
