#pragma once

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "magbern/core/errors.hpp"
#include "magbern/core/rng.hpp"
#include "magbern/lattice/torus.hpp"

namespace magbern::lattice {

/// Either "all eigenpairs with λ <= energy" or "the lowest `count`".
struct Cutoff {
    enum class Kind { energy, count };
    Kind kind = Kind::count;
    double energy = 0.0;
    int count = 0;

    static Cutoff by_energy(double e) { return {Kind::energy, e, 0}; }
    static Cutoff by_count(int k) { return {Kind::count, 0.0, k}; }
};

struct EigenOptions {
    std::uint64_t seed = 0x5eedULL;
    /// Residual bound ‖Hv - λv‖ <= tol · max(1, |λ|).
    double tol = 1e-9;
    /// Dense LAPACK solve up to this dimension, iterative above.
    int dense_limit = 1024;
    /// Force the iterative path regardless of size.
    bool force_iterative = false;
    int max_iterations = 400;
    /// Block width; 0 picks max(6, nphi + 2).
    int block = 0;
    /// Reject energy cutoffs above 0.1/h^2 (where the grid stops resolving
    /// the continuum operator).
    bool enforce_band = true;
};

/// Orthonormal eigenpairs (ascending) of a discretized operator.
struct SpectralSubspace {
    TorusSetup setup;
    Eigen::VectorXd values;
    Eigen::MatrixXcd vectors;  // columns, Euclidean-orthonormal
    double cutoff = 0.0;
    double tolerance = 0.0;
    double max_residual = 0.0;
    double orthonormality_error = 0.0;

    [[nodiscard]] int size() const { return static_cast<int>(values.size()); }
};

namespace detail {

inline double max_orth_error(const Eigen::MatrixXcd& V) {
    if (V.cols() == 0) return 0.0;
    const Eigen::MatrixXcd G = V.adjoint() * V - Eigen::MatrixXcd::Identity(V.cols(), V.cols());
    return G.cwiseAbs().maxCoeff();
}

inline double max_residual(const SparseOp& H, const Eigen::VectorXd& w, const Eigen::MatrixXcd& V) {
    double r = 0.0;
    for (int j = 0; j < V.cols(); ++j) {
        const double res = (H * V.col(j) - w(j) * V.col(j)).norm();
        r = std::max(r, res / std::max(1.0, std::abs(w(j))));
    }
    return r;
}

/// Dense Hermitian solve via zheevr: eigenvalues in (vl, vu] or indices
/// [il, iu] (1-based).
inline void dense_zheevr(const SparseOp& H, bool by_value, double vl, double vu, int il, int iu,
                         Eigen::VectorXd& w_out, Eigen::MatrixXcd& z_out) {
    const int n = static_cast<int>(H.rows());
    Eigen::MatrixXcd A = Eigen::MatrixXcd(H);
    std::vector<double> w(static_cast<std::size_t>(n));
    const int cols = by_value ? n : std::max(0, iu - il + 1);
    Eigen::MatrixXcd Z(n, std::max(cols, 1));
    std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(n));
    lapack_int m = 0;
    const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', by_value ? 'V' : 'I', 'L', n, A.data(), n, vl,
                                           vu, il, iu, 0.0, &m, w.data(), Z.data(), n, isuppz.data());
    if (info != 0) throw NumericalError("zheevr failed with info = " + std::to_string(info));
    w_out = Eigen::Map<Eigen::VectorXd>(w.data(), m);
    z_out = Z.leftCols(m);
}

/// Number of eigenvalues strictly below e, from the inertia of an
/// LDL^H factorization of H - eI.
inline int count_below(const SparseOp& H, double e) {
    SparseOp S = H;
    for (int i = 0; i < S.rows(); ++i) S.coeffRef(i, i) -= e;
    Eigen::SimplicialLDLT<SparseOp, Eigen::Lower> ldlt(S);
    if (ldlt.info() != Eigen::Success) throw NumericalError("LDL^H factorization failed while counting eigenvalues");
    int neg = 0;
    const auto d = ldlt.vectorD();
    for (int i = 0; i < d.size(); ++i) {
        if (!std::isfinite(d(i).real())) throw NumericalError("singular pivot while counting eigenvalues");
        if (d(i).real() < 0.0) ++neg;
    }
    return neg;
}

/// Lowest k eigenpairs by shift-invert block Krylov iteration with full
/// reorthogonalization and Rayleigh-Ritz extraction.
///
/// The subspace grows by (H - σ)^{-1} applied to the current unconverged
/// Ritz block, orthogonalized twice against everything kept; when it
/// reaches the size cap it restarts from the lowest Ritz vectors.
inline void shift_invert_lowest(const SparseOp& H, int k, int block, const EigenOptions& opt,
                                Eigen::VectorXd& w_out, Eigen::MatrixXcd& z_out) {
    const int n = static_cast<int>(H.rows());
    require(k >= 1 && k <= n, "requested eigenpair count out of range");
    const int b = std::min(n, std::max(1, block));
    const int cap = std::min(n, std::max(3 * k, k + 8 * b));
    const double lo = gershgorin_lower(H);
    const double sigma = lo - 0.05 * (1.0 + std::abs(lo));

    SparseOp S = H;
    for (int i = 0; i < n; ++i) S.coeffRef(i, i) -= sigma;
    Eigen::SimplicialLDLT<SparseOp, Eigen::Lower> solver(S);
    if (solver.info() != Eigen::Success) throw NumericalError("shift-invert factorization failed");

    SplitStream rng(opt.seed);
    Eigen::MatrixXcd X(n, b);
    for (int j = 0; j < b; ++j)
        for (int i = 0; i < n; ++i) X(i, j) = cplx(rng.normal(), rng.normal());

    Eigen::MatrixXcd V(n, 0);
    Eigen::MatrixXcd HV(n, 0);
    auto append = [&](Eigen::MatrixXcd W) {
        for (int pass = 0; pass < 2; ++pass)
            if (V.cols() > 0) W -= V * (V.adjoint() * W);
        // Column-wise Gram-Schmidt with deflation of dependent directions.
        std::vector<Eigen::VectorXcd> keep;
        for (int j = 0; j < W.cols(); ++j) {
            Eigen::VectorXcd w = W.col(j);
            const double n0 = w.norm();
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& q : keep) w -= q * q.dot(w);
                if (V.cols() > 0) w -= V * (V.adjoint() * w);
            }
            const double nw = w.norm();
            if (nw > 1e-10 * std::max(n0, 1e-300)) keep.push_back(w / nw);
        }
        if (keep.empty()) return 0;
        const auto old = V.cols();
        const auto add = static_cast<Eigen::Index>(keep.size());
        V.conservativeResize(n, old + add);
        HV.conservativeResize(n, old + add);
        for (Eigen::Index j = 0; j < add; ++j) {
            V.col(old + j) = keep[static_cast<std::size_t>(j)];
            HV.col(old + j) = H * keep[static_cast<std::size_t>(j)];
        }
        return static_cast<int>(add);
    };
    append(X);

    for (int it = 0; it < opt.max_iterations; ++it) {
        const Eigen::MatrixXcd T = V.adjoint() * HV;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (T + T.adjoint()));
        const int have = static_cast<int>(V.cols());
        const int kk = std::min(k, have);
        const Eigen::MatrixXcd Y = V * es.eigenvectors().leftCols(kk);
        const Eigen::MatrixXcd HY = HV * es.eigenvectors().leftCols(kk);
        std::vector<int> open;
        for (int j = 0; j < kk; ++j) {
            const double th = es.eigenvalues()(j);
            const double res = (HY.col(j) - th * Y.col(j)).norm();
            if (res > opt.tol * std::max(1.0, std::abs(th))) open.push_back(j);
        }
        if (kk == k && open.empty()) {
            w_out = es.eigenvalues().head(k);
            z_out = Y;
            return;
        }
        // Expansion block: the lowest unconverged Ritz vectors, padded with
        // the next Ritz vectors so the block keeps its width.
        Eigen::MatrixXcd P(n, 0);
        {
            std::vector<int> pick(open.begin(), open.end());
            for (int j = kk; j < have && static_cast<int>(pick.size()) < b; ++j) pick.push_back(j);
            if (static_cast<int>(pick.size()) > b) pick.resize(static_cast<std::size_t>(b));
            P.resize(n, static_cast<Eigen::Index>(pick.size()));
            for (std::size_t j = 0; j < pick.size(); ++j)
                P.col(static_cast<Eigen::Index>(j)) = V * es.eigenvectors().col(pick[j]);
        }
        if (have + P.cols() > cap) {
            // Restart from the lowest Ritz vectors.
            const int keep = std::min(have, k + b);
            const Eigen::MatrixXcd R = V * es.eigenvectors().leftCols(keep);
            V.resize(n, 0);
            HV.resize(n, 0);
            append(R);
        }
        Eigen::MatrixXcd W(n, P.cols());
        for (int j = 0; j < P.cols(); ++j) W.col(j) = solver.solve(P.col(j));
        if (append(W) == 0) {
            // Krylov space exhausted; inject fresh random directions.
            Eigen::MatrixXcd Rn(n, b);
            for (int j = 0; j < b; ++j)
                for (int i = 0; i < n; ++i) Rn(i, j) = cplx(rng.normal(), rng.normal());
            if (append(Rn) == 0 && V.cols() < k)
                throw NumericalError("eigensolver subspace cannot be extended");
        }
    }
    throw NumericalError("iterative eigensolver did not converge within " + std::to_string(opt.max_iterations) +
                         " iterations");
}

}  // namespace detail

/// Eigenpairs of op below a cutoff. Dense LAPACK for small problems; the
/// shift-invert Krylov solver otherwise. Deterministic for a fixed seed.
inline SpectralSubspace eigensolve(const MagneticOperator& op, const Cutoff& cut, const EigenOptions& opt = {}) {
    const auto& H = op.H;
    const int n = static_cast<int>(H.rows());
    SpectralSubspace out;
    out.setup = op.setup;
    out.tolerance = opt.tol;
    if (cut.kind == Cutoff::Kind::energy && opt.enforce_band) {
        const double hmax = std::max(op.setup.h1(), op.setup.h2());
        require(cut.energy <= 0.1 / (hmax * hmax),
                "energy cutoff " + std::to_string(cut.energy) + " lies above the resolved band 0.1/h^2 = " +
                    std::to_string(0.1 / (hmax * hmax)));
    }
    if (cut.kind == Cutoff::Kind::count) require(cut.count >= 0 && cut.count <= n, "eigenpair count out of range");

    const bool dense = !opt.force_iterative && n <= opt.dense_limit;
    if (dense) {
        if (cut.kind == Cutoff::Kind::energy) {
            const double lo = gershgorin_lower(H) - 1.0;
            if (cut.energy > lo) detail::dense_zheevr(H, true, lo, cut.energy, 0, 0, out.values, out.vectors);
            out.cutoff = cut.energy;
        } else {
            if (cut.count > 0) detail::dense_zheevr(H, false, 0, 0, 1, cut.count, out.values, out.vectors);
            out.cutoff = cut.count > 0 ? out.values(cut.count - 1) : -std::numeric_limits<double>::infinity();
        }
    } else {
        int k = cut.count;
        if (cut.kind == Cutoff::Kind::energy) {
            // Nudge past the cutoff so eigenvalues equal to it are included.
            k = detail::count_below(H, cut.energy + 1e-12 * std::max(1.0, std::abs(cut.energy)));
            out.cutoff = cut.energy;
        }
        const int block = opt.block > 0 ? opt.block : std::max(6, op.setup.nphi() + 2);
        if (k > 0) {
            detail::shift_invert_lowest(H, k, block, opt, out.values, out.vectors);
        } else {
            out.values.resize(0);
            out.vectors.resize(n, 0);
        }
        if (cut.kind == Cutoff::Kind::count) out.cutoff = k > 0 ? out.values(k - 1) : 0.0;
    }
    if (out.vectors.cols() == 0) out.vectors.resize(n, 0);
    out.max_residual = detail::max_residual(H, out.values, out.vectors);
    out.orthonormality_error = detail::max_orth_error(out.vectors);
    if (out.max_residual > std::max(opt.tol, 1e-8))
        throw NumericalError("eigenpair residual " + std::to_string(out.max_residual) + " exceeds tolerance");
    return out;
}

}  // namespace magbern::lattice
