#pragma once

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "magbern/core/errors.hpp"
#include "magbern/landau/grid_field.hpp"

namespace magbern::lattice {

using cplx = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;

/// Which integer-flux rule a setup is checked against.
///  product:    B L1 L2 ∈ 2πZ (the torus closure needs this one);
///  difference: B (L2 - L1) ∈ 2πZ (reported for comparison only).
enum class FluxRule { product, difference };

struct FluxReport {
    double product_quanta = 0.0;     // B L1 L2 / 2π
    double difference_quanta = 0.0;  // B (L2 - L1) / 2π
    bool product_ok = false;
    bool difference_ok = false;
};

/// Box Λ_L = [0, L1) x [0, L2) with an N1 x N2 grid and constant field B.
struct TorusSetup {
    double L1 = 1.0;
    double L2 = 1.0;
    double B = 0.0;
    int N1 = 4;
    int N2 = 4;

    [[nodiscard]] double h1() const { return L1 / N1; }
    [[nodiscard]] double h2() const { return L2 / N2; }
    [[nodiscard]] int size() const { return N1 * N2; }
    [[nodiscard]] double flux_quanta() const { return B * L1 * L2 / (2.0 * std::numbers::pi); }
    [[nodiscard]] int nphi() const { return static_cast<int>(std::lround(flux_quanta())); }
    [[nodiscard]] int index(int i1, int i2) const { return i1 * N2 + i2; }
    [[nodiscard]] landau::GridGeometry geometry() const { return {N1, N2, 0.0, 0.0, h1(), h2()}; }

    /// Square box holding `nphi` flux quanta with at least `per_length`
    /// grid points per magnetic length 1/sqrt(B).
    static TorusSetup square(double B, int nphi, double per_length = 8.0) {
        require(B > 0.0 && nphi >= 1, "square torus needs B > 0 and nphi >= 1");
        const double L = std::sqrt(2.0 * std::numbers::pi * nphi / B);
        const int N = std::max(4, static_cast<int>(std::ceil(L * std::sqrt(B) * per_length)));
        return {L, L, B, N, N};
    }
};

inline bool near_integer(double v, double tol = 1e-9) {
    return std::abs(v - std::round(v)) <= tol * std::max(1.0, std::abs(v));
}

inline FluxReport flux_report(const TorusSetup& s) {
    FluxReport r;
    r.product_quanta = s.flux_quanta();
    r.difference_quanta = s.B * (s.L2 - s.L1) / (2.0 * std::numbers::pi);
    r.product_ok = near_integer(r.product_quanta);
    r.difference_ok = near_integer(r.difference_quanta);
    return r;
}

/// Throws ValidationError unless the setup is usable under `rule`.
inline void validate(const TorusSetup& s, FluxRule rule = FluxRule::product) {
    require(s.L1 > 0.0 && s.L2 > 0.0, "box sides must be positive");
    require(s.B >= 0.0, "field strength must be non-negative");
    require(s.N1 >= 4 && s.N2 >= 4, "grid resolution must be at least 4 per axis");
    const FluxReport r = flux_report(s);
    if (rule == FluxRule::product)
        require(r.product_ok, "flux quantization violated: B*L1*L2/(2*pi) = " + std::to_string(r.product_quanta) +
                                  " is not an integer");
    else
        require(r.difference_ok, "flux rule B*(L2-L1) in 2*pi*Z violated: value/(2*pi) = " +
                                     std::to_string(r.difference_quanta));
}

/// Finite-volume magnetic Laplacian (plus optional potential) on the torus.
struct MagneticOperator {
    TorusSetup setup;
    SparseOp H;
    std::vector<double> potential;  // empty when absent
};

/// Peierls discretization of (i∇ + A)^2 in the Landau gauge A = (0, B x1):
///  x2-links from (x1, x2) carry exp(-i B x1 h2), x1-links carry 1 except the
///  closing link from the last column, which carries exp(i B L1 x2) (the
///  quasi-periodicity ψ(x1 + L1, x2) = e^{iBL1 x2} ψ(x1, x2)). Every
///  plaquette then has phase product exp(-i B h1 h2).
inline MagneticOperator assemble(const TorusSetup& s, const std::optional<std::vector<double>>& potential = {},
                                 FluxRule rule = FluxRule::product) {
    validate(s, rule);
    // The closing phases are only consistent under the product rule.
    validate(s, FluxRule::product);
    const int n = s.size();
    if (potential) require(static_cast<int>(potential->size()) == n, "potential size does not match the grid");
    const double h1 = s.h1();
    const double h2 = s.h2();
    const double c1 = 1.0 / (h1 * h1);
    const double c2 = 1.0 / (h2 * h2);
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 5);
    auto link = [&](int a, int b, cplx u, double c) {
        trip.emplace_back(a, b, -c * u);
        trip.emplace_back(b, a, -c * std::conj(u));
    };
    for (int i1 = 0; i1 < s.N1; ++i1) {
        const double x1 = i1 * h1;
        for (int i2 = 0; i2 < s.N2; ++i2) {
            const double x2 = i2 * h2;
            const int a = s.index(i1, i2);
            double diag = 2.0 * c1 + 2.0 * c2;
            if (potential) diag += (*potential)[static_cast<std::size_t>(a)];
            trip.emplace_back(a, a, diag);
            const cplx u1 = (i1 == s.N1 - 1) ? std::polar(1.0, s.B * s.L1 * x2) : cplx(1.0);
            link(a, s.index((i1 + 1) % s.N1, i2), u1, c1);
            link(a, s.index(i1, (i2 + 1) % s.N2), std::polar(1.0, -s.B * x1 * h2), c2);
        }
    }
    MagneticOperator op{s, SparseOp(n, n), potential.value_or(std::vector<double>{})};
    op.H.setFromTriplets(trip.begin(), trip.end());
    op.H.makeCompressed();
    return op;
}

/// Largest |plaquette product - exp(-i B h1 h2)| over all plaquettes,
/// read back from the assembled matrix.
inline double plaquette_defect(const MagneticOperator& op) {
    const auto& s = op.setup;
    const double c1 = 1.0 / (s.h1() * s.h1());
    const double c2 = 1.0 / (s.h2() * s.h2());
    auto u = [&](int i1, int i2, int axis) {
        const int a = s.index(i1, i2);
        const int b = axis == 1 ? s.index((i1 + 1) % s.N1, i2) : s.index(i1, (i2 + 1) % s.N2);
        return -op.H.coeff(a, b) / (axis == 1 ? c1 : c2);
    };
    const cplx target = std::polar(1.0, -s.B * s.h1() * s.h2());
    double worst = 0.0;
    for (int i1 = 0; i1 < s.N1; ++i1)
        for (int i2 = 0; i2 < s.N2; ++i2) {
            const int j1 = (i1 + 1) % s.N1;
            const int j2 = (i2 + 1) % s.N2;
            const cplx p = u(i1, i2, 1) * u(j1, i2, 2) * std::conj(u(i1, j2, 1)) * std::conj(u(i1, i2, 2));
            worst = std::max(worst, std::abs(p - target));
        }
    return worst;
}

/// ‖H - H^*‖_max.
inline double hermiticity_defect(const MagneticOperator& op) {
    const SparseOp d = SparseOp(op.H.adjoint()) - op.H;
    double worst = 0.0;
    for (int k = 0; k < d.outerSize(); ++k)
        for (SparseOp::InnerIterator it(d, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    return worst;
}

/// One "row col re im" line per stored entry, 0-based indices.
inline void write_triplets(const MagneticOperator& op, std::ostream& os) {
    os.precision(17);
    for (int k = 0; k < op.H.outerSize(); ++k)
        for (SparseOp::InnerIterator it(op.H, k); it; ++it)
            os << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
}

/// Lower bound on the spectrum from Gershgorin discs.
inline double gershgorin_lower(const SparseOp& H) {
    std::vector<double> diag(static_cast<std::size_t>(H.rows()), 0.0);
    std::vector<double> off(static_cast<std::size_t>(H.rows()), 0.0);
    for (int k = 0; k < H.outerSize(); ++k)
        for (SparseOp::InnerIterator it(H, k); it; ++it) {
            const auto r = static_cast<std::size_t>(it.row());
            if (it.row() == it.col())
                diag[r] = it.value().real();
            else
                off[r] += std::abs(it.value());
        }
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < diag.size(); ++i) lo = std::min(lo, diag[i] - off[i]);
    return lo;
}

}  // namespace magbern::lattice
