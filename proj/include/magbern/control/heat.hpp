#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <ostream>
#include <thread>
#include <vector>

#include "magbern/core/errors.hpp"
#include "magbern/core/numerics.hpp"
#include "magbern/geometry/mask.hpp"
#include "magbern/inequality/constants.hpp"
#include "magbern/lattice/eigensolve.hpp"

namespace magbern::control {

using cplx = std::complex<double>;

/// Controlled heat flow u' + H u = 1_S f restricted to a spectral subspace.
/// Coefficients refer to the L2-normalized eigenbasis.
struct HeatProblem {
    const lattice::SpectralSubspace* subspace = nullptr;
    const geometry::SetMask* mask = nullptr;
    double T = 1.0;
    Eigen::VectorXcd u0;
    int nodes = 64;

    void validate() const {
        require(subspace != nullptr && mask != nullptr, "heat problem needs a subspace and a mask");
        require(subspace->size() > 0, "heat problem needs a nonempty subspace");
        require(T > 0.0, "horizon T must be positive");
        require(u0.size() == subspace->size(), "initial coefficients do not match the subspace");
        require(nodes >= 1, "quadrature needs at least one node");
        require(mask->n1() == subspace->setup.N1 && mask->n2() == subspace->setup.N2,
                "mask grid does not match the torus grid");
    }
};

/// e^{-λ_k t} u0_k.
inline Eigen::VectorXcd propagate(const lattice::SpectralSubspace& sub, const Eigen::VectorXcd& u0, double t) {
    require(t >= 0.0, "propagation time must be non-negative");
    require(u0.size() == sub.size(), "coefficient vector does not match the subspace");
    Eigen::VectorXcd out(u0.size());
    for (int k = 0; k < u0.size(); ++k) out(k) = std::exp(-sub.values(k) * t) * u0(k);
    return out;
}

/// M_kl = <φ_k, 1_S φ_l>.
inline Eigen::MatrixXcd masked_form(const lattice::SpectralSubspace& sub, const geometry::SetMask& mask) {
    Eigen::MatrixXcd W = sub.vectors;
    for (int i1 = 0; i1 < mask.n1(); ++i1)
        for (int i2 = 0; i2 < mask.n2(); ++i2)
            if (!mask.at(i1, i2)) W.row(sub.setup.index(i1, i2)).setZero();
    Eigen::MatrixXcd M = sub.vectors.adjoint() * W;
    return 0.5 * (M + M.adjoint());
}

/// ‖e^{-TH} u0‖^2 / ∫_0^T ‖e^{-tH} u0‖^2_{L2(S)} dt.
inline double observability_quotient(const HeatProblem& p) {
    p.validate();
    const Eigen::MatrixXcd M = masked_form(*p.subspace, *p.mask);
    const auto rule = gauss_legendre(p.nodes, 0.0, p.T);
    double den = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const Eigen::VectorXcd u = propagate(*p.subspace, p.u0, rule.nodes[i]);
        den += rule.weights[i] * (u.adjoint() * M * u)(0).real();
    }
    const double num = propagate(*p.subspace, p.u0, p.T).squaredNorm();
    if (!(den > 1e-300 && den > 1e-30 * p.T * p.u0.squaredNorm()))
        throw NumericalError("observability denominator underflows (S misses the subspace)");
    return num / den;
}

/// G_T = ∫_0^T e^{-sH} M e^{-sH} ds by Gauss-Legendre in s = T - t. Node
/// terms are built in parallel and summed in node order.
inline Eigen::MatrixXcd gramian(const lattice::SpectralSubspace& sub, const Eigen::MatrixXcd& M, double T,
                                int nodes) {
    const auto rule = gauss_legendre(nodes, 0.0, T);
    const int n = sub.size();
    std::vector<Eigen::MatrixXcd> terms(rule.nodes.size());
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            Eigen::VectorXd d(n);
            for (int k = 0; k < n; ++k) d(k) = std::exp(-sub.values(k) * rule.nodes[i]);
            terms[i] = rule.weights[i] * (d.asDiagonal() * M * d.asDiagonal());
        }
    };
    const std::size_t threads = std::min<std::size_t>(4, rule.nodes.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t)
        pool.emplace_back(work, rule.nodes.size() * t / threads, rule.nodes.size() * (t + 1) / threads);
    work(0, rule.nodes.size() / threads);
    for (auto& th : pool) th.join();
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& t : terms) G += t;
    return 0.5 * (G + G.adjoint());
}

/// Closed form of the same integral: M_kl (1 - e^{-(λk+λl)T}) / (λk+λl).
inline Eigen::MatrixXcd gramian_exact(const lattice::SpectralSubspace& sub, const Eigen::MatrixXcd& M, double T) {
    const int n = sub.size();
    Eigen::MatrixXcd G(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            const double s = sub.values(k) + sub.values(l);
            const double f = std::abs(s) < 1e-300 ? T : -std::expm1(-s * T) / s;
            G(k, l) = M(k, l) * f;
        }
    return G;
}

struct HumResult {
    std::vector<double> times;              // quadrature nodes t_i
    std::vector<double> weights;
    std::vector<Eigen::VectorXcd> control;  // q(t_i); the control is f(t) = 1_S Σ_k q_k(t) φ_k
    Eigen::VectorXcd adjoint;               // p
    double cost = 0.0;                      // ‖f‖_{L2((0,T) x S)}
    double gramian_energy = 0.0;            // p^* G_T p
    double terminal_residual = 0.0;         // ‖u(T)‖ / ‖u0‖, exact time integration
    double condition = 0.0;
    double truncation_factor = 0.0;         // e^{-E_max T}

    static void write_trajectory_header(std::ostream& os) { os << "t,k,re,im\n"; }
    void write_trajectory(std::ostream& os) const {
        os.precision(17);
        for (std::size_t i = 0; i < times.size(); ++i)
            for (int k = 0; k < control[i].size(); ++k)
                os << times[i] << ',' << k << ',' << control[i](k).real() << ',' << control[i](k).imag() << '\n';
    }
};

/// Ill-conditioned Gramian, with the eigenvector of its smallest eigenvalue.
class GramianError : public NumericalError {
public:
    GramianError(const std::string& msg, Eigen::VectorXcd witness)
        : NumericalError(msg), witness_(std::move(witness)) {}
    [[nodiscard]] const Eigen::VectorXcd& witness() const { return witness_; }

private:
    Eigen::VectorXcd witness_;
};

/// Minimal-norm null control by HUM: solve G_T p = -e^{-TH} u0 and set
/// f(t) = 1_S e^{-(T-t)H} p. Then u(T) = e^{-TH} u0 + G_T p and the cost
/// squared is p^* G_T p.
inline HumResult hum_control(const HeatProblem& prob, double eps_target = 1e-8) {
    prob.validate();
    const auto& sub = *prob.subspace;
    const Eigen::MatrixXcd M = masked_form(sub, *prob.mask);
    const Eigen::MatrixXcd G = gramian(sub, M, prob.T, prob.nodes);
    HumResult r;
    r.truncation_factor = std::exp(-sub.cutoff * prob.T);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    r.condition = lmin > 0.0 ? lmax / lmin : INFINITY;
    if (!(r.condition <= 1e14))
        throw GramianError("Gramian condition number " + std::to_string(r.condition) + " exceeds 1e14",
                           es.eigenvectors().col(0));

    const Eigen::VectorXcd rhs = -propagate(sub, prob.u0, prob.T);
    if (rhs.norm() == 0.0) {
        r.adjoint = Eigen::VectorXcd::Zero(sub.size());
    } else {
        const Eigen::LDLT<Eigen::MatrixXcd> ldlt(G);
        if (ldlt.info() != Eigen::Success) throw NumericalError("Gramian factorization failed");
        Eigen::VectorXcd p = ldlt.solve(rhs);
        for (int it = 0; it < 3; ++it) p += ldlt.solve(rhs - G * p);
        r.adjoint = p;
    }

    const auto rule = gauss_legendre(prob.nodes, 0.0, prob.T);
    r.times = rule.nodes;
    r.weights = rule.weights;
    for (double t : rule.nodes) {
        Eigen::VectorXcd q(sub.size());
        for (int k = 0; k < sub.size(); ++k) q(k) = std::exp(-sub.values(k) * (prob.T - t)) * r.adjoint(k);
        r.control.push_back(q);
    }
    double cost2 = 0.0;
    for (std::size_t i = 0; i < r.times.size(); ++i)
        cost2 += r.weights[i] * (r.control[i].adjoint() * M * r.control[i])(0).real();
    r.cost = std::sqrt(std::max(0.0, cost2));
    r.gramian_energy = (r.adjoint.adjoint() * G * r.adjoint)(0).real();

    const double n0 = prob.u0.norm();
    if (n0 > 0.0) {
        const Eigen::VectorXcd uT = propagate(sub, prob.u0, prob.T) + gramian_exact(sub, M, prob.T) * r.adjoint;
        r.terminal_residual = uT.norm() / n0;
    }
    if (r.terminal_residual > eps_target)
        throw NumericalError("HUM terminal residual " + std::to_string(r.terminal_residual) + " exceeds target " +
                             std::to_string(eps_target));
    return r;
}

/// Worst-case cost over ‖u0‖ = 1: C_obs^2 = λ_max(e^{-TH} G_T^{-1} e^{-TH}).
inline double control_cost_squared(const lattice::SpectralSubspace& sub, const geometry::SetMask& mask, double T,
                                   int nodes = 64) {
    require(T > 0.0, "horizon T must be positive");
    const Eigen::MatrixXcd M = masked_form(sub, mask);
    const Eigen::MatrixXcd G = gramian(sub, M, T, nodes);
    Eigen::VectorXd d(sub.size());
    for (int k = 0; k < sub.size(); ++k) d(k) = std::exp(-sub.values(k) * T);
    const Eigen::LDLT<Eigen::MatrixXcd> ldlt(G);
    if (ldlt.info() != Eigen::Success) throw NumericalError("Gramian factorization failed");
    const Eigen::MatrixXcd X = d.asDiagonal() * ldlt.solve(Eigen::MatrixXcd(d.asDiagonal()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (X + X.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

/// Universal constants of the abstract observability estimate.
struct CostConstants {
    double c5 = 1.0;
    double c6 = 1.0;
    double c7 = 1.0;
    /// Single constant C of the structural cost bound.
    double c = 2.0;
};

/// (C5 d0 / T) (2 d0 ‖X‖ + 1)^C6 exp(C7 d1^2 / T), in log space.
inline Magnitude abstract_cost(Magnitude d0, double d1, double T, double x_norm, const CostConstants& k = {}) {
    require(d1 >= 0.0 && T > 0.0, "abstract cost needs d1 >= 0 and T > 0");
    const double log_d0 = d0.log;
    // log(2 d0 ‖X‖ + 1) without overflow.
    const double log_inner = x_norm > 0.0 ? log_add(std::log(2.0 * x_norm) + log_d0, 0.0) : 0.0;
    return Magnitude::from_log(std::log(k.c5) + log_d0 - std::log(T) + k.c6 * log_inner + k.c7 * d1 * d1 / T);
}

/// Split of the traced spectral constant into d0 · exp(d1 √E).
struct SpectralSplit {
    Magnitude d0;
    double d1 = 0.0;
};

/// The traced constant is 4 (96π/ρ)^(κ0 + κ1 √E) with
///   κ0 = 2 (ln 16 + 2·240^2 (|ℓ|_1 √B + |ℓ|_1^2 B)) / ln 2 + 1,
///   κ1 = 2 · 2·240^2 |ℓ|_1 / ln 2,
/// so d0 = 4 (96π/ρ)^κ0 and d1 = κ1 ln(96π/ρ).
inline SpectralSplit traced_split(double rho, double l_sum, double B) {
    require(rho > 0.0 && rho <= 1.0, "rho must lie in (0, 1]");
    const double k = 2.0 * 240.0 * 240.0;
    const double base = std::log(96.0 * std::numbers::pi / rho);
    const double kappa0 = 2.0 * (std::log(16.0) + k * (l_sum * std::sqrt(B) + l_sum * l_sum * B)) / std::numbers::ln2 + 1.0;
    const double kappa1 = 2.0 * k * l_sum / std::numbers::ln2;
    return {Magnitude::from_log(std::log(4.0) + kappa0 * base), kappa1 * base};
}

/// Upper bound on C_obs^2 at horizon T.
///  traced:     abstract_cost(d0, d1, T/2, 1) e^{-BT} (no control on [0, T/2]);
///  structural: C / (T ρ^(C + C|ℓ|_1^2 B)) exp(ln(C/ρ) C |ℓ|_1^2 / T - BT).
inline Magnitude cost_bound(double rho, double l_sum, double B, double T,
                            const inequality::ThmConstants& c = inequality::ThmConstants::traced(),
                            const CostConstants& k = {}) {
    require(T > 0.0, "horizon T must be positive");
    require(rho > 0.0 && rho <= 1.0, "rho must lie in (0, 1]");
    require(B >= 0.0 && l_sum >= 0.0, "B and |l|_1 must be non-negative");
    if (c.mode == inequality::ThmConstants::Mode::traced) {
        const auto split = traced_split(rho, l_sum, B);
        return Magnitude::from_log(abstract_cost(split.d0, split.d1, 0.5 * T, 1.0, k).log - B * T);
    }
    const double C = k.c;
    const double l2 = l_sum * l_sum;
    return Magnitude::from_log(std::log(C) - std::log(T) - (C + C * l2 * B) * std::log(rho) +
                               std::log(C / rho) * C * l2 / T - B * T);
}

/// One row of a control sweep.
struct ControlSweepRow {
    double T = 0.0;
    double rho = 0.0;
    double l1 = 0.0;
    double l2 = 0.0;
    double B = 0.0;
    double e_max = 0.0;
    double hum_cost = 0.0;
    Magnitude bound_traced;
    double residual = 0.0;

    static void write_csv_header(std::ostream& os) {
        os << "T,rho,l1,l2,B,E_max,hum_cost,bound_traced,residual\n";
    }
    /// bound_traced is written as exp(log) when it overflows a double.
    void write_csv_row(std::ostream& os) const {
        os.precision(12);
        os << T << ',' << rho << ',' << l1 << ',' << l2 << ',' << B << ',' << e_max << ',' << hum_cost << ',';
        if (bound_traced.finite_as_double())
            os << bound_traced.value();
        else
            os << "exp(" << bound_traced.log << ')';
        os << ',' << residual << '\n';
    }
};

}  // namespace magbern::control
