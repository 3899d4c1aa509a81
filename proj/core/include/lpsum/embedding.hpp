#pragma once

#include <cstdint>
#include <vector>

#include "lpsum/conditioning.hpp"
#include "lpsum/matrix.hpp"
#include "lpsum/pnorm.hpp"
#include "lpsum/stream.hpp"

namespace lpsum {

/// Shape of the merge-and-reduce tree: blocks of block_rows rows are reduced
/// to d x d change-of-basis summaries, summaries concatenate in arrival order,
/// and a buffer that reaches block_rows is reduced again one level up.
struct TreeConfig {
    double gamma = 0.5;          // in (0, 1)
    std::size_t block_rows = 0;  // 0: derive ceil(n^gamma) when n is known
    PNorm p = PNorm::of(1.0);
    WcbMethod method = WcbMethod::rounding;
    std::uint64_t seed = 0;
    std::size_t distortion_samples = 1024;  // per-reduce certification samples

    std::size_t levels_cap() const;  // ceil(1/gamma) + 1
    void validate(std::size_t width) const;
};

std::size_t derive_block_rows(std::size_t n, double gamma);

struct NodeTrace {
    std::size_t level;        // 1 = leaf reduce
    std::size_t input_rows;
    std::size_t output_rows;
    double certified_distortion;
};

struct EmbeddingResult {
    MatrixF T;                          // final summary, <= block_rows x d
    std::size_t levels_used = 0;        // deepest reduce chain
    double per_level_distortion_bound;  // nominal d
    double total_lower_factor;          // d^{-levels_used}
    double certified_lower_product;     // product of certified node factors
    std::vector<NodeTrace> trace;
    bool rank_flagged = false;
    std::size_t peak_numbers = 0;  // high-water mark of buffered doubles
};

struct ReduceOutcome {
    MatrixF S;  // d x d summary (zero-padded rows if the block lost rank)
    double certified_distortion;  // d_eff: ||Bx||_p / d_eff <= ||Sx||_p <= ||Bx||_p
    bool rank_flagged = false;
};

/// One reduce step: factor B = U S, certify the operator ratio spread of U,
/// and rescale S so the upper side of the sandwich is tight.
ReduceOutcome reduce_block(const MatrixF& b, PNorm p, WcbMethod method,
                           std::uint64_t seed = 0, std::size_t n_samples = 1024);

/// Streaming merge-and-reduce over the whole input; the stream's block size
/// is the leaf block size (cfg.block_rows, when set, must agree).
EmbeddingResult subspace_embed(RowBlockStream& stream, const TreeConfig& cfg);

/// Explicit tree evaluation. fanout = 0 means the deep streaming tree and
/// reproduces subspace_embed bit for bit; fanout >= 2 builds a balanced tree
/// whose internal nodes concatenate that many child summaries per reduce.
EmbeddingResult tree_simulate(const MatrixF& a, const TreeConfig& cfg,
                              std::size_t fanout);

namespace detail {

/// Certified two-sided spread of y -> ||Uy||_p / ||y||_p: sampled extremes
/// with local refinement, capped by unconditional singular-value bounds.
struct RatioSpread {
    double lo;       // normalization scale (lower ratio estimate)
    double d_eff;    // certified spread with safety factor
};
RatioSpread certify_ratio_spread(const MatrixF& u, PNorm p, std::uint64_t seed,
                                 std::size_t n_samples);

}  // namespace detail

}  // namespace lpsum
