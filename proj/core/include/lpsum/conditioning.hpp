#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpsum/matrix.hpp"
#include "lpsum/pnorm.hpp"

namespace lpsum {

enum class WcbMethod { orth, spc3, rounding };

std::string wcb_method_name(WcbMethod m);
WcbMethod wcb_method_from_name(const std::string& name);

/// Conditioning certificate for a basis U: entrywise norm bound alpha
/// (||U||_p <= alpha) and dual-direction bound beta (||z||_q <= beta ||Uz||_p
/// for all z). alpha is recorded exactly from the constructed basis; beta is
/// certified empirically with a safety factor, capped by a singular-value
/// bound that holds unconditionally.
struct WcbCertificate {
    double alpha = 0.0;
    double beta = 0.0;
    PNorm p = PNorm::of(2.0);
    WcbMethod method = WcbMethod::orth;
};

/// A full-column-rank precondition failed. Carries the detected numerical
/// rank (singular values below 1e-10 x largest are treated as zero).
class RankDeficientError : public std::runtime_error {
public:
    RankDeficientError(std::size_t detected, std::size_t wanted);
    std::size_t detected_rank() const noexcept { return detected_; }

private:
    std::size_t detected_;
};

/// The rounding iteration hit its cap before reaching tolerance; the
/// certificate of the last iterate rides along for diagnosis.
class RoundingConvergenceError : public std::runtime_error {
public:
    RoundingConvergenceError(const std::string& what, WcbCertificate last);
    const WcbCertificate& last_certificate() const noexcept { return last_; }

private:
    WcbCertificate last_;
};

/// Basis factorization with both change-of-basis directions materialized:
/// U = A R and U S = A with S = R^{-1}.
struct WcbFactorization {
    MatrixF U;  // n x d
    MatrixF R;  // d x d
    MatrixF S;  // d x d
    WcbCertificate cert;
    bool converged = true;
};

struct WcbCheckResult {
    bool pass;
    double worst_alpha_ratio;  // ||U||_p / alpha
    double worst_beta_ratio;   // max_z ||z||_q / (beta ||Uz||_p)
};

/// Orthonormal basis by Householder QR (signs fixed so the triangular factor
/// has a nonnegative diagonal). Certificate (sqrt(d), 1, 2); deterministic.
WcbFactorization wcb_orth(const MatrixF& a);

/// Deterministic basis for finite p != 2 by ellipsoidal rounding of the QR
/// factor: barycentric coordinate-ascent on row weights (the determinant-
/// optimal fixed point for exponent p), then a rescale that pins the sampled
/// dual-direction ratio at one. The certificate records measured values with
/// safety factor 2, not the theoretical optimum.
WcbFactorization wcb_rounding(const MatrixF& a, PNorm p, double tol = 1e-6);

/// Randomized ell_1 basis: sparse Cauchy sketch of ceil(8 d log2(d+1)) rows,
/// QR of the sketch, R pulled back to the full matrix. Reproducible for a
/// fixed seed; a rank-deficient sketch is resampled with seed+1 up to 3
/// attempts. Nominal certificate (d^2.5, 1, 1).
WcbFactorization wcb_spc3(const MatrixF& a, std::uint64_t seed);

/// Dispatch on method; p governs certification. rounding at p = 2 routes to
/// the exact orthonormal path.
WcbFactorization make_wcb(const MatrixF& a, PNorm p, WcbMethod method,
                          std::uint64_t seed);

/// Condition (i) checked exactly (one norm), condition (ii) over n_samples
/// random unit dual-norm directions plus the 2d signed coordinate vectors.
/// Fails if either ratio exceeds 1.
WcbCheckResult wcb_check(const WcbFactorization& f, std::size_t n_samples,
                         std::uint64_t seed);

struct LewisResult {
    std::vector<double> weights;
    bool regularized = false;  // Gram matrix needed a 1e-12 trace bump
    double residual = 0.0;     // fixed-point residual of the returned weights
    std::size_t iterations = 0;
    bool converged = true;
};

/// Fixed-point row weights w_i = (a_i^T (A^T W^{1-2/p} A)^{-1} a_i)^{p/2}
/// from a uniform start, stopping when the max relative change drops below
/// tol. Public contract restricted to p in {1, 2}.
LewisResult lewis_weights(const MatrixF& a, PNorm p, std::size_t iters = 200,
                          double tol = 1e-8);

namespace detail {

/// Weight iteration for any positive finite exponent: plain for p <= 2,
/// geometric damping with exponent 2/p above (which keeps the update a
/// contraction in the log metric).
LewisResult lewis_weights_any(const MatrixF& a, double p, std::size_t iters,
                              double tol);

std::size_t numerical_rank(const MatrixF& a, double rel_tol = 1e-10);

/// alpha exact, beta = min(2 x sampled worst ratio, singular-value cap).
WcbCertificate certify_basis(const MatrixF& u, PNorm p, WcbMethod method,
                             std::uint64_t seed, std::size_t n_samples);

/// Unconditional bound on sup_z ||z||_q / ||Uz||_p via sigma_min and norm
/// equivalence constants.
double beta_rigorous(const MatrixF& u, PNorm p);

/// Worst sampled ||z||_q / ||Uz||_p over random unit dual directions, the 2d
/// signed axes, and local ascent refinement of the best starts.
double sampled_beta(const MatrixF& u, PNorm p, std::uint64_t seed,
                    std::size_t n_samples);

}  // namespace detail

}  // namespace lpsum
