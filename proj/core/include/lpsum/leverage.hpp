#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lpsum/conditioning.hpp"
#include "lpsum/matrix.hpp"
#include "lpsum/pnorm.hpp"
#include "lpsum/stream.hpp"

namespace lpsum {

/// Per-row importance scores w_i = ||e_i^T U||_p^p for a basis U = A R,
/// with the threshold applied and the surviving row indices.
struct LeverageReport {
    std::vector<double> scores;
    PNorm p = PNorm::of(2.0);
    WcbCertificate cert;
    double threshold = 0.0;
    std::vector<std::size_t> kept;
};

/// Carry-over state of the single-pass high-importance-row scan: the retained
/// rows in original-data coordinates, their source indices, and the budget
/// accounting of the last reduction.
struct SummaryState {
    MatrixF B;
    std::vector<std::size_t> origin;
    std::vector<double> kept_scores;  // local scores of B's rows at the last reduce
    std::size_t budget_rows = 0;
    double tau = 0.0;
    double adjust = 0.0;  // d * alpha^p * beta of the last block's basis
    WcbCertificate last_cert;
    bool rank_flagged = false;
    std::size_t blocks_processed = 0;
    std::size_t max_rows_after_reduce = 0;
    double lemma_cap = 0.0;  // max over blocks of d beta alpha^{2p} / tau
};

/// w_i = p-th power of the p-norm of row i of F.U; p is taken from the
/// certificate and must be finite.
std::vector<double> leverage_scores(const WcbFactorization& f);

/// Rows of W whose score in F exceeds tau (strictly), in original order.
/// F must have been computed from W (same row count).
std::pair<MatrixF, std::vector<std::size_t>> lev_score_check(
    const WcbFactorization& f, const MatrixF& w, double tau);

/// Single pass over the stream: per block, build a basis of [block; carried],
/// score every stored row, and keep the rows whose local score exceeds
/// tau / (d alpha^p beta) with the certified constants of that basis. Every
/// row whose global score exceeds tau survives to the end.
SummaryState stream_high_leverage(RowBlockStream& stream, PNorm p, double tau,
                                  WcbMethod method, std::uint64_t seed);

struct LocalGlobalPair {
    std::size_t row;       // index into the full matrix
    double global_score;   // w_i from a basis of the full matrix
    double local_score;    // w-hat_i from a basis of the block alone
};

struct LocalGlobalGap {
    std::vector<LocalGlobalPair> pairs;
    double alpha_global;  // certified alpha of the full-matrix basis
    double beta_local;    // certified beta of the block basis
    double drop_factor;   // d * alpha_global^p * beta_local
};

/// Aligned (global, local) score pairs for the rows of one block; the local
/// score never drops below global / drop_factor.
LocalGlobalGap local_global_gap(const MatrixF& a,
                                std::span<const std::size_t> block_rows, PNorm p,
                                WcbMethod method, std::uint64_t seed = 0);

/// Row-norm surrogate scores ||e_i^T B||_2^2 / ||B||_F^2; they sum to one.
/// The no-conditioning baseline thresholds these at 2/m.
std::vector<double> surrogate_scores(const MatrixF& b);

struct SampleResult {
    MatrixF rows;
    std::vector<std::size_t> origin;
};

/// Reservoir sample of min(m, n) rows, reproducible for a fixed seed.
SampleResult uniform_sample(RowBlockStream& stream, std::size_t m,
                            std::uint64_t seed);

namespace detail {

/// Basis and scores for a stored block, reducing columns by pivoted QR when
/// the block is rank deficient (scores are then taken in the reduced space).
struct ScoredBasis {
    std::vector<double> scores;
    WcbCertificate cert;
    bool reduced_rank = false;
    std::size_t rank = 0;
};

ScoredBasis score_block(const MatrixF& x, PNorm p, WcbMethod method,
                        std::uint64_t seed);

}  // namespace detail

}  // namespace lpsum
