#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <ostream>

#include "magbern/core/errors.hpp"
#include "magbern/geometry/mask.hpp"
#include "magbern/inequality/constants.hpp"
#include "magbern/landau/grid_field.hpp"
#include "magbern/lattice/eigensolve.hpp"

namespace magbern::inequality {

struct EmpiricalConstant {
    double constant = 1.0;  // 1 / λ_min
    double lambda_min = 1.0;
    double lambda_max = 1.0;
    int dimension = 0;
};

/// Sharp C with ‖f‖^2 <= C ‖f‖^2_{L2(S)} on the span of the subspace:
/// 1/λ_min of the Gram matrix G = V^* diag(1_S) V (the common cell area
/// cancels against ‖f‖^2). Mask cell (i1, i2) is torus node (i1, i2).
inline EmpiricalConstant empirical_constant(const lattice::SpectralSubspace& sub, const geometry::SetMask& mask) {
    require(sub.size() > 0, "empirical constant needs a nonempty subspace");
    require(mask.n1() == sub.setup.N1 && mask.n2() == sub.setup.N2, "mask grid does not match the torus grid");
    const Eigen::MatrixXcd& V = sub.vectors;
    Eigen::MatrixXcd W = V;
    for (int i1 = 0; i1 < mask.n1(); ++i1)
        for (int i2 = 0; i2 < mask.n2(); ++i2)
            if (!mask.at(i1, i2)) W.row(sub.setup.index(i1, i2)).setZero();
    // Solving against V^*V absorbs any orthonormality drift of the solver.
    const Eigen::MatrixXcd gram_s = V.adjoint() * W;
    const Eigen::MatrixXcd gram = V.adjoint() * V;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        0.5 * (gram_s + gram_s.adjoint()), 0.5 * (gram + gram.adjoint()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("Gram eigenproblem failed");
    EmpiricalConstant r;
    r.dimension = sub.size();
    r.lambda_min = es.eigenvalues().minCoeff();
    r.lambda_max = es.eigenvalues().maxCoeff();
    if (r.lambda_min <= 1e-14)
        throw NumericalError("inequality numerically void: lambda_min = " + std::to_string(r.lambda_min) +
                             " (the subspace concentrates off S)");
    r.constant = 1.0 / r.lambda_min;
    return r;
}

/// One bound-vs-empirical comparison.
struct ConstantComparison {
    double E = 0.0;
    double B = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double rho = 0.0;
    double c_emp = 0.0;
    Magnitude c_traced;
    bool pass = false;

    static void write_csv_header(std::ostream& os) { os << "E,B,l1,l2,rho,C_emp,C_traced,pass\n"; }
    /// C_traced is written as its natural logarithm when it overflows a double.
    void write_csv_row(std::ostream& os) const {
        os.precision(12);
        os << E << ',' << B << ',' << l1 << ',' << l2 << ',' << rho << ',' << c_emp << ',';
        if (c_traced.finite_as_double())
            os << c_traced.value();
        else
            os << "exp(" << c_traced.log << ')';
        os << ',' << (pass ? 1 : 0) << '\n';
    }
};

inline ConstantComparison compare_constants(double E, double B, double l1, double l2, double rho, double c_emp) {
    ConstantComparison c{E, B, l1, l2, rho, c_emp, theoretical_constant(E, B, l1 + l2, rho), false};
    c.pass = Magnitude::from_value(c_emp) <= c.c_traced;
    return c;
}

/// ∫_{a}^{b} exp(-B (t - c)^2 / 2) dt.
inline double gaussian_interval(double a, double b, double c, double B) {
    const double s = std::sqrt(0.5 * B);
    return std::sqrt(std::numbers::pi / (2.0 * B)) * (std::erf(s * (b - c)) - std::erf(s * (a - c)));
}

/// ‖f_y‖^2_{L2(S)} = ∫_S exp(-B|x - y|^2/2) dx, integrated exactly cell by
/// cell (the integrand is separable). S is empty outside the mask grid.
inline double necessity_decay(landau::Vec2 y, double B, const geometry::SetMask& s) {
    require(B > 0.0, "necessity decay needs B > 0");
    std::vector<double> w1(static_cast<std::size_t>(s.n1()));
    std::vector<double> w2(static_cast<std::size_t>(s.n2()));
    for (int i = 0; i < s.n1(); ++i) {
        const double a = s.x0() + i * s.h1();
        w1[static_cast<std::size_t>(i)] = gaussian_interval(a, a + s.h1(), y.x1, B);
    }
    for (int j = 0; j < s.n2(); ++j) {
        const double a = s.y0() + j * s.h2();
        w2[static_cast<std::size_t>(j)] = gaussian_interval(a, a + s.h2(), y.x2, B);
    }
    double total = 0.0;
    for (int i = 0; i < s.n1(); ++i)
        for (int j = 0; j < s.n2(); ++j)
            if (s.at(i, j)) total += w1[static_cast<std::size_t>(i)] * w2[static_cast<std::size_t>(j)];
    return total;
}

}  // namespace magbern::inequality
