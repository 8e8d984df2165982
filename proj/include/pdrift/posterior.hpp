#ifndef PDRIFT_POSTERIOR_HPP
#define PDRIFT_POSTERIOR_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pdrift/fourier.hpp"
#include "pdrift/local_time.hpp"
#include "pdrift/prior.hpp"
#include "pdrift/rng.hpp"

namespace pdrift {

/// Galerkin form of the weak variational problem a(u, v) = r(v):
///   A_ik = eta (4 pi^2 ceil(i/2)^2)^p delta_ik + eta kappa delta_ik
///          + (1/M) sum_j phi_i(x_j) phi_k(x_j) L_j
///   r_i  = -(1/2)(1/M) sum_j phi_i'(x_j) L_j + (1/M) sum_j phi_i(x_j) chi_j
/// with quadrature at bin centers x_j = (j + 1/2)/M.
struct AssembledSystem {
    Eigen::MatrixXd A;
    Eigen::VectorXd r;
    PriorSpec spec;
    double horizon = 0.0;
};

/// Exact Gaussian posterior on the Galerkin subspace, plus the untouched
/// prior tail beyond mode N.
struct PosteriorGaussian {
    PriorSpec spec;
    FourierCoeffs mean;
    Eigen::MatrixXd precision;
    double horizon = 0.0;
};

namespace detail {

/// Basis values (and derivatives) tabulated at the local-time bin centers.
inline void basis_tables(std::size_t n_modes, std::size_t M,
                         Eigen::MatrixXd& phi, Eigen::MatrixXd& dphi) {
    phi.resize(static_cast<Eigen::Index>(n_modes), static_cast<Eigen::Index>(M));
    dphi.resize(static_cast<Eigen::Index>(n_modes), static_cast<Eigen::Index>(M));
    for (std::size_t k = 1; k <= n_modes; ++k)
        for (std::size_t j = 0; j < M; ++j) {
            const double x = bin_center(j, M);
            phi(k - 1, j) = basis_eval(k, x);
            dphi(k - 1, j) = basis_deriv(k, x);
        }
}

}  // namespace detail

inline AssembledSystem assemble(const PriorSpec& spec, const LocalTimeField& lt,
                                const ChiField& chi) {
    spec.validate();
    if (lt.M != chi.M) throw std::invalid_argument("assemble: field grids differ");
    if (lt.M < 2 * spec.N + 2)
        throw std::invalid_argument("assemble: grid too coarse, need M >= 2N + 2");
    for (double v : lt.values)
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("assemble: local time must be finite and non-negative");

    const std::size_t n = spec.N;
    const std::size_t M = lt.M;
    Eigen::MatrixXd phi, dphi;
    detail::basis_tables(n, M, phi, dphi);

    Eigen::VectorXd lvals = Eigen::Map<const Eigen::VectorXd>(
        lt.values.data(), static_cast<Eigen::Index>(M));
    Eigen::VectorXd cvals(static_cast<Eigen::Index>(M));
    for (std::size_t j = 0; j < M; ++j) cvals[static_cast<Eigen::Index>(j)] = chi.values[j];

    AssembledSystem sys;
    sys.spec = spec;
    sys.horizon = lt.horizon;
    const double invm = 1.0 / static_cast<double>(M);
    sys.A = invm * (phi * lvals.asDiagonal() * phi.transpose());
    for (std::size_t k = 1; k <= n; ++k)
        sys.A(k - 1, k - 1) += prior_precision(spec, k);
    sys.r = invm * (-0.5 * (dphi * lvals) + phi * cvals);
    return sys;
}

/// SPD solve of A m = r with iterative refinement down to relative residual
/// 1e-10.
inline FourierCoeffs solve_mean(const AssembledSystem& sys) {
    const Eigen::Index n = sys.A.rows();
    Eigen::LLT<Eigen::MatrixXd> llt(sys.A);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("solve_mean: assembly-integrity error (matrix not SPD)");
    const double rnorm = sys.r.norm();
    FourierCoeffs mean = FourierCoeffs::zeros(static_cast<std::size_t>(n));
    if (rnorm == 0.0) return mean;
    Eigen::VectorXd m = llt.solve(sys.r);
    for (int it = 0; it < 3; ++it) {
        Eigen::VectorXd resid = sys.r - sys.A * m;
        if (resid.norm() / rnorm <= 1e-12) break;
        m += llt.solve(resid);
    }
    if ((sys.r - sys.A * m).norm() / rnorm > 1e-10)
        throw std::runtime_error("solve_mean: residual tolerance not reached");
    for (Eigen::Index i = 0; i < n; ++i) mean.c[static_cast<std::size_t>(i)] = m[i];
    return mean;
}

inline PosteriorGaussian compute_posterior(const PriorSpec& spec, const LocalTimeField& lt,
                                           const ChiField& chi) {
    AssembledSystem sys = assemble(spec, lt, chi);
    PosteriorGaussian post;
    post.spec = spec;
    post.mean = solve_mean(sys);
    post.precision = std::move(sys.A);
    post.horizon = sys.horizon;
    return post;
}

/// ||mean_N - mean_{2N}||_{H^p} with the refined mean truncated back to N
/// modes; a Galerkin convergence diagnostic.
inline double galerkin_refinement_check(const PriorSpec& spec, const LocalTimeField& lt,
                                        const ChiField& chi) {
    PriorSpec fine = spec;
    fine.N = 2 * spec.N;
    const FourierCoeffs coarse = solve_mean(assemble(spec, lt, chi));
    const FourierCoeffs refined = solve_mean(assemble(fine, lt, chi));
    auto diff = FourierCoeffs::zeros(spec.N);
    for (std::size_t k = 0; k < spec.N; ++k) diff.c[k] = refined.c[k] - coarse.c[k];
    return sobolev_norm(diff, static_cast<double>(spec.p));
}

/// tr(C_T) = tr(A^{-1}) + sum_{k > N} lambda_k, the tail summed until the
/// analytic remainder bound drops below 1e-12.
inline double covariance_trace(const PosteriorGaussian& post) {
    Eigen::LLT<Eigen::MatrixXd> llt(post.precision);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("covariance_trace: precision not SPD");
    const Eigen::Index n = post.precision.rows();
    const Eigen::MatrixXd inv =
        llt.solve(Eigen::MatrixXd::Identity(n, n));
    double trace = inv.trace();

    // Tail over sine/cosine pairs m > N/2.  Remainder beyond m_stop is
    // bounded by 2/(eta (4 pi^2)^p) * m_stop^{1-2p} / (2p - 1).
    const PriorSpec& spec = post.spec;
    const double lead = 2.0 / (spec.eta * detail::int_pow(two_pi * two_pi, spec.p));
    std::size_t m = spec.N / 2 + 1 + (spec.N % 2);  // first untouched sine/cosine pair
    if (spec.N % 2 == 1) trace += eigenvalue(spec, spec.N + 1);  // odd N: lone cosine
    for (;; ++m) {
        const double bound =
            lead * std::pow(static_cast<double>(m - 1), 1.0 - 2.0 * spec.p) /
            (2.0 * spec.p - 1.0);
        if (bound < 1e-12 || m > 100000000) break;
        trace += 2.0 * eigenvalue(spec, 2 * m);
    }
    return trace;
}

/// Galerkin-subspace draw: mean + A^{-1/2} z via the Cholesky factor.
inline FourierCoeffs sample_posterior_coeffs(const PosteriorGaussian& post, RngStream& rng) {
    const std::size_t n = post.spec.N;
    Eigen::LLT<Eigen::MatrixXd> llt(post.precision);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("sample_posterior: precision not SPD");
    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) z[static_cast<Eigen::Index>(k)] = rng.normal();
    // cov(L^{-T} z) = (L L^T)^{-1} = A^{-1}
    Eigen::VectorXd w = llt.matrixU().solve(z);
    FourierCoeffs draw = post.mean;
    for (std::size_t k = 0; k < n; ++k) draw.c[k] += w[static_cast<Eigen::Index>(k)];
    return draw;
}

/// Draw from the posterior on a grid: the Galerkin-subspace draw plus the
/// prior tail sum_{k > N} sqrt(lambda_k) phi_k Z_k, truncated where
/// lambda_k < 1e-16.
inline GridFunction sample_posterior(const PosteriorGaussian& post, RngStream& rng,
                                     std::size_t M) {
    const std::size_t n = post.spec.N;
    const FourierCoeffs draw = sample_posterior_coeffs(post, rng);
    GridFunction g = synthesize(draw, M);
    for (std::size_t k = n + 1;; ++k) {
        const double lam = eigenvalue(post.spec, k);
        if (lam < 1e-16) break;
        const double amp = std::sqrt(lam) * rng.normal();
        for (std::size_t j = 0; j < M; ++j)
            g.v[j] += amp * basis_eval(k, static_cast<double>(j) / static_cast<double>(M));
    }
    return g;
}

/// -Phi_T(b; X) evaluated through the local-time fields:
///   -Phi_T = -(1/2)(1/M) sum_j L_j (b^2 + b') + (1/M) sum_j chi_j b,
/// quadrature at bin centers.
inline double log_likelihood(const FourierCoeffs& c, const LocalTimeField& lt,
                             const ChiField& chi) {
    if (lt.M != chi.M) throw std::invalid_argument("log_likelihood: field grids differ");
    const FourierCoeffs dc = differentiate(c, 1);
    double acc = 0.0;
    for (std::size_t j = 0; j < lt.M; ++j) {
        const double x = bin_center(j, lt.M);
        const double b = c.eval(x);
        acc += -0.5 * lt.values[j] * (b * b + dc.eval(x)) + chi.values[j] * b;
    }
    return acc / static_cast<double>(lt.M);
}

/// Tikhonov objective Lambda(u; X): quadratic data term on the grid plus the
/// exact coefficient-space penalty (eta/2)(||u^{(p)}||^2 contribution split
/// between the two pieces below).
inline double penalized_objective(const FourierCoeffs& c, const LocalTimeField& lt,
                                  const ChiField& chi, const PriorSpec& spec) {
    if (lt.M != chi.M) throw std::invalid_argument("penalized_objective: field grids differ");
    const FourierCoeffs dc = differentiate(c, 1);
    double acc = 0.0;
    for (std::size_t j = 0; j < lt.M; ++j) {
        const double x = bin_center(j, lt.M);
        const double b = c.eval(x);
        acc += 0.5 * b * b * (spec.eta * spec.kappa + lt.values[j]) +
               0.5 * dc.eval(x) * lt.values[j] - b * chi.values[j];
    }
    const double hp = sobolev_norm(c, static_cast<double>(spec.p));
    return acc / static_cast<double>(lt.M) + 0.5 * spec.eta * hp * hp;
}

}  // namespace pdrift

#endif
