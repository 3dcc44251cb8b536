#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>

#include "magbern/core/errors.hpp"
#include "magbern/core/rng.hpp"
#include "magbern/landau/grid_field.hpp"
#include "magbern/lattice/torus.hpp"

namespace magbern::lattice {

/// Translation by (n1 h1, n2 h2) on the torus grid.
struct LatticeShift {
    int n1 = 0;
    int n2 = 0;
};

/// Γ_y commutes with the torus operator iff B y1 L2 and B y2 L1 lie in 2πZ.
inline bool translation_allowed(const TorusSetup& s, LatticeShift y) {
    const double y1 = y.n1 * s.h1();
    const double y2 = y.n2 * s.h2();
    const double two_pi = 2.0 * std::numbers::pi;
    return near_integer(s.B * y1 * s.L2 / two_pi) && near_integer(s.B * y2 * s.L1 / two_pi);
}

/// Γ_y Γ_y' = e^{iB(y1 y'2 - y2 y'1)} Γ_y' Γ_y; the translations commute
/// iff that phase is trivial.
inline bool translations_commute(const TorusSetup& s, LatticeShift a, LatticeShift b) {
    const double v = s.B * (a.n1 * s.h1() * b.n2 * s.h2() - a.n2 * s.h2() * b.n1 * s.h1());
    return near_integer(v / (2.0 * std::numbers::pi));
}

/// (Γ_y ψ)(x) = e^{iB y1 x2} ψ̃(x - y), with ψ̃ the quasi-periodic
/// extension ψ̃(x1 + L1, x2) = e^{iBL1 x2} ψ(x1, x2), ψ̃(x1, x2 + L2) = ψ(x1, x2).
inline Eigen::VectorXcd magnetic_translate(const TorusSetup& s, const Eigen::VectorXcd& psi, LatticeShift y) {
    require(psi.size() == s.size(), "vector size does not match the torus grid");
    Eigen::VectorXcd out(psi.size());
    const double y1 = y.n1 * s.h1();
    auto floordiv = [](int a, int n) { return a >= 0 ? a / n : -((-a + n - 1) / n); };
    for (int i1 = 0; i1 < s.N1; ++i1)
        for (int i2 = 0; i2 < s.N2; ++i2) {
            const double x2 = i2 * s.h2();
            const int j1 = i1 - y.n1;
            const int j2 = i2 - y.n2;
            const int q1 = floordiv(j1, s.N1);
            const int q2 = floordiv(j2, s.N2);
            const int r1 = j1 - q1 * s.N1;
            const int r2 = j2 - q2 * s.N2;
            // x - y = (r1 h1 + q1 L1, r2 h2 + q2 L2); the q2 L2 part of the
            // phase is trivial by flux quantization.
            const double ext = s.B * s.L1 * q1 * (r2 * s.h2());
            const double phase = s.B * y1 * x2 + ext;
            out(s.index(i1, i2)) = std::polar(1.0, phase) * psi(s.index(r1, r2));
        }
    return out;
}

/// GridField wrapper; the field must live on the torus grid.
inline landau::GridField magnetic_translate(const TorusSetup& s, const landau::GridField& f, LatticeShift y) {
    require(f.geometry() == s.geometry(), "field does not live on the torus grid");
    const Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(f.data().data(), s.size());
    const Eigen::VectorXcd w = magnetic_translate(s, v, y);
    return {f.geometry(), std::vector<cplx>(w.data(), w.data() + w.size())};
}

/// max over random probes of ‖(HΓ_y - Γ_yH)ψ‖ / (‖H‖_1 ‖ψ‖).
inline double commutation_check(const MagneticOperator& op, LatticeShift y, int probes = 4,
                                std::uint64_t seed = 7) {
    require(translation_allowed(op.setup, y), "shift violates the flux condition for this box");
    SplitStream rng(seed);
    double hnorm = 0.0;
    for (int k = 0; k < op.H.outerSize(); ++k) {
        double col = 0.0;
        for (SparseOp::InnerIterator it(op.H, k); it; ++it) col += std::abs(it.value());
        hnorm = std::max(hnorm, col);
    }
    double worst = 0.0;
    for (int p = 0; p < probes; ++p) {
        Eigen::VectorXcd psi(op.setup.size());
        for (int i = 0; i < psi.size(); ++i) psi(i) = cplx(rng.normal(), rng.normal());
        const Eigen::VectorXcd lhs = op.H * magnetic_translate(op.setup, psi, y);
        const Eigen::VectorXcd rhs = magnetic_translate(op.setup, Eigen::VectorXcd(op.H * psi), y);
        worst = std::max(worst, (lhs - rhs).norm() / (std::max(hnorm, 1e-300) * psi.norm()));
    }
    return worst;
}

}  // namespace magbern::lattice
