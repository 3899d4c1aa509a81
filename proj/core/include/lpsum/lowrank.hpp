#pragma once

#include <cstdint>
#include <vector>

#include "lpsum/embedding.hpp"
#include "lpsum/matrix.hpp"
#include "lpsum/stream.hpp"

namespace lpsum {

enum class InnerMode { enumerated, randomized };

struct LowRankCaps {
    std::size_t cap_n = 64;           // enumerated-mode row cap
    std::size_t cap_d = 8;            // enumerated-mode column cap
    std::size_t max_candidates = 200; // randomized-mode candidate budget
};

struct LowRankResult {
    MatrixF left;   // n x k
    MatrixF right;  // k x d
    std::size_t k = 0;
    double l1_error = 0.0;  // ||A - left right||_1, recomputed on the full data
    InnerMode inner_method = InnerMode::enumerated;
    bool rank_padded = false;  // fewer than k usable directions
};

double l1_error(const MatrixF& x, const MatrixF& left, const MatrixF& right);

/// Rank-k entrywise-ell_1 approximation of one stored block. Candidates are
/// column patterns combined with weight-derived sampling selections rounded
/// to powers of two; each candidate's bilinear factor pair is fit by
/// alternating ell_1 regression on the sketched objective, and every
/// candidate is re-scored against the full matrix before the argmin (ties
/// break to the earliest candidate). The zero factorization is always among
/// the candidates. Enumerated mode walks the full candidate grid and is
/// deterministic; the caps are hard preconditions. Randomized mode samples
/// max_candidates tuples from the same distributions, reproducibly by seed.
LowRankResult l1_rank_k_inner(const MatrixF& x, std::size_t k, InnerMode mode,
                              std::uint64_t seed, const LowRankCaps& caps = {});

struct WcbDecomposition {
    MatrixF u;  // n x k
    MatrixF s;  // k x k (zero-padded when rank collapsed)
    double ratio_lo = 0.0;  // sampled extremes of ||Wx||_1 / ||Sx||_1
    double ratio_hi = 0.0;
    bool flagged = false;
};

/// W = U S with U an ell_1 basis; reports the sampled two-sided agreement
/// between ||Wx||_1 and ||Sx||_1 and asserts it is a bounded spread.
WcbDecomposition l1_decompose_wcb(const MatrixF& w);

/// Merge-and-reduce composition: per group, the inner solver's output is
/// rank-decomposed, its left factor reduced through an ell_1 basis, and the
/// k x d direction matrix passed upward. The root directions P are then fit
/// to the data in a second pass by per-row ell_1 regression (pass2 must
/// replay the same rows as pass1).
LowRankResult l1_lowrank_tree(RowBlockStream& pass1, RowBlockStream& pass2,
                              std::size_t k, const TreeConfig& cfg, InnerMode mode,
                              std::uint64_t seed, const LowRankCaps& caps = {});

/// Dense reference optimizer for rank-1 entrywise ell_1: alternating weighted
/// medians from many restarts. Independent of the sketch-based path; used as
/// the comparison baseline at desk scale.
double l1_rank_one_optimum(const MatrixF& x, std::size_t restarts = 64,
                           std::size_t iters = 200, std::uint64_t seed = 1);

}  // namespace lpsum
