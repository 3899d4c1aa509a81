#include "lpsum/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eigen_util.hpp"
#include "lpsum/rng.hpp"

namespace lpsum {

std::size_t TreeConfig::levels_cap() const {
    return static_cast<std::size_t>(std::ceil(1.0 / gamma)) + 1;
}

void TreeConfig::validate(std::size_t width) const {
    if (!(gamma > 0.0) || !(gamma < 1.0)) {
        throw std::invalid_argument("TreeConfig: gamma must lie in (0, 1)");
    }
    if (p.is_inf()) throw std::invalid_argument("TreeConfig: finite p required");
    if (block_rows != 0 && block_rows < width) {
        throw std::invalid_argument("TreeConfig: block_rows below column count");
    }
}

std::size_t derive_block_rows(std::size_t n, double gamma) {
    return static_cast<std::size_t>(
        std::ceil(std::pow(static_cast<double>(std::max<std::size_t>(n, 1)), gamma)));
}

namespace detail {

namespace {

double ratio_at(const MatrixF& u, PNorm p, const std::vector<double>& y) {
    const double den = vector_pnorm(y, p);
    if (den == 0.0) return 1.0;
    return vector_pnorm(matvec(u, y), p) / den;
}

// Hill-climb the ratio from a starting direction; sign +1 maximizes.
double refine(const MatrixF& u, PNorm p, std::vector<double> y, double sign,
              Rng& rng) {
    double best = ratio_at(u, p, y);
    double step = 0.25;
    const std::size_t d = y.size();
    std::vector<double> cand(d);
    for (int it = 0; it < 120; ++it) {
        bool improved = false;
        for (int trial = 0; trial < 6; ++trial) {
            for (std::size_t j = 0; j < d; ++j) cand[j] = y[j] + step * rng.normal();
            const double r = ratio_at(u, p, cand);
            if (sign * (r - best) > 0.0) {
                best = r;
                y = cand;
                improved = true;
            }
        }
        if (!improved) {
            step *= 0.5;
            if (step < 1e-9) break;
        }
    }
    return best;
}

}  // namespace

RatioSpread certify_ratio_spread(const MatrixF& u, PNorm p, std::uint64_t seed,
                                 std::size_t n_samples) {
    const std::size_t d = u.cols();
    const double pv = p.value();

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(u));
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    const double nn = static_cast<double>(u.rows());
    const double dd = static_cast<double>(d);
    const double hi_rig = std::pow(nn, std::max(0.0, 1.0 / pv - 0.5)) * smax *
                          std::pow(dd, std::max(0.0, 0.5 - 1.0 / pv));
    const double lo_rig = std::pow(nn, std::min(0.0, 1.0 / pv - 0.5)) * smin *
                          std::pow(dd, std::min(0.0, 0.5 - 1.0 / pv));

    if (pv == 2.0) {
        // Exact: the ratio spread of a linear map in the 2-norm is its
        // singular value range.
        return RatioSpread{smin, smax / smin};
    }

    Rng rng(seed, 0x726174696fULL);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    std::vector<double> lo_start(d, 0.0), hi_start(d, 0.0), y(d, 0.0);
    auto consider = [&](const std::vector<double>& dir) {
        const double r = ratio_at(u, p, dir);
        if (r < lo) { lo = r; lo_start = dir; }
        if (r > hi) { hi = r; hi_start = dir; }
    };
    for (std::size_t j = 0; j < d; ++j) {
        std::fill(y.begin(), y.end(), 0.0);
        y[j] = 1.0;
        consider(y);
    }
    for (std::size_t k = 0; k < n_samples; ++k) {
        for (std::size_t j = 0; j < d; ++j) y[j] = rng.normal();
        const double nrm = vector_pnorm(y, PNorm::of(2.0));
        if (nrm == 0.0) continue;
        for (std::size_t j = 0; j < d; ++j) y[j] /= nrm;
        consider(y);
    }
    lo = std::min(lo, refine(u, p, lo_start, -1.0, rng));
    hi = std::max(hi, refine(u, p, hi_start, +1.0, rng));

    RatioSpread out;
    out.lo = std::max(lo_rig, lo * (1.0 - 1e-9));
    const double hi_cert = std::min(hi_rig, 2.0 * hi);
    out.d_eff = hi_cert / out.lo;
    return out;
}

}  // namespace detail

ReduceOutcome reduce_block(const MatrixF& b, PNorm p, WcbMethod method,
                           std::uint64_t seed, std::size_t n_samples) {
    if (p.is_inf()) throw std::invalid_argument("reduce_block: finite p required");
    const std::size_t d = b.cols();

    MatrixF basis_input = b;
    Eigen::MatrixXd z;  // maps reduced columns back to the full width
    bool reduced = false;
    std::size_t rank = d;
    {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(detail::to_eigen(b));
        qr.setThreshold(1e-10);
        rank = static_cast<std::size_t>(qr.rank());
        if (rank == 0) {
            ReduceOutcome out;
            out.S = MatrixF(d, d);
            out.certified_distortion = 1.0;
            out.rank_flagged = true;
            return out;
        }
        if (rank < d) {
            reduced = true;
            std::vector<std::size_t> cols(rank);
            const auto& perm = qr.colsPermutation().indices();
            for (std::size_t k = 0; k < rank; ++k) {
                cols[k] = static_cast<std::size_t>(perm(static_cast<Eigen::Index>(k)));
            }
            std::sort(cols.begin(), cols.end());
            basis_input = b.select_cols(cols);
            // Solve basis_input * z = b in the least-squares sense; the
            // residual is below the rank threshold by construction.
            Eigen::MatrixXd c = detail::to_eigen(basis_input);
            z = c.colPivHouseholderQr().solve(detail::to_eigen(b));
        }
    }

    WcbFactorization f = make_wcb(basis_input, p, method, seed);
    auto spread = detail::certify_ratio_spread(f.U, p, hash_key(seed, 0xd1f7), n_samples);

    Eigen::MatrixXd s_part = detail::to_eigen(f.S);
    if (reduced) s_part = s_part * z;  // rank x d
    s_part *= spread.lo;               // tighten the upper side of the sandwich

    MatrixF s_full(d, d);
    for (std::size_t i = 0; i < static_cast<std::size_t>(s_part.rows()); ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            s_full(i, j) = s_part(static_cast<Eigen::Index>(i),
                                  static_cast<Eigen::Index>(j));
        }
    }
    ReduceOutcome out;
    out.S = std::move(s_full);
    out.certified_distortion = spread.d_eff;
    out.rank_flagged = reduced;
    return out;
}

namespace {

struct Summary {
    MatrixF S;
    std::size_t depth;   // reduces applied along the deepest contributing path
    double product;      // certified distortion product along that path
};

// Eager merge-and-reduce engine shared by the streaming and tree drivers.
class MergeReduceEngine {
public:
    MergeReduceEngine(const TreeConfig& cfg, std::size_t width, std::size_t block_rows)
        : cfg_(cfg), width_(width), block_rows_(block_rows) {}

    void consume_leaf(const MatrixF& block) {
        current_input_ = block.size();
        peak_ = std::max(peak_, buffered_ + current_input_);
        if (block.rows() < width_) {
            // Short leftover block: merge upward without a reduce.
            push(0, Summary{block, 0, 1.0});
        } else {
            push(0, reduce_leaf(block));
        }
        current_input_ = 0;
    }

    EmbeddingResult finish() {
        // Reduce lower levels until everything fits in one block.
        for (std::size_t l = 0; l < buffers_.size(); ++l) {
            if (total_rows() <= block_rows_) break;
            flush(l);
        }
        EmbeddingResult res;
        res.T = MatrixF(0, width_);
        res.certified_lower_product = 1.0;
        res.levels_used = 0;
        for (std::size_t l = buffers_.size(); l-- > 0;) {
            for (const auto& s : buffers_[l]) {
                res.T.append_rows(s.S);
                res.levels_used = std::max(res.levels_used, s.depth);
                res.certified_lower_product = std::max(res.certified_lower_product, s.product);
            }
        }
        res.per_level_distortion_bound = static_cast<double>(width_);
        res.total_lower_factor =
            std::pow(static_cast<double>(width_), -static_cast<double>(res.levels_used));
        res.trace = std::move(trace_);
        res.rank_flagged = rank_flagged_;
        res.peak_numbers = peak_;
        return res;
    }

    Summary reduce_leaf(const MatrixF& block) {
        auto out = reduce_block(block, cfg_.p, cfg_.method, next_seed(), cfg_.distortion_samples);
        rank_flagged_ = rank_flagged_ || out.rank_flagged;
        trace_.push_back(NodeTrace{1, block.rows(), out.S.rows(), out.certified_distortion});
        return Summary{std::move(out.S), 1, out.certified_distortion};
    }

private:
    std::size_t total_rows() const {
        std::size_t r = 0;
        for (const auto& lvl : buffers_)
            for (const auto& s : lvl) r += s.S.rows();
        return r;
    }

    void push(std::size_t level, Summary s) {
        if (level >= buffers_.size()) buffers_.resize(level + 1);
        if (rows_at(level) + s.S.rows() > block_rows_) flush(level);
        buffered_ += s.S.size();
        buffers_[level].push_back(std::move(s));
        peak_ = std::max(peak_, buffered_ + current_input_);
    }

    std::size_t rows_at(std::size_t level) const {
        std::size_t r = 0;
        for (const auto& s : buffers_[level]) r += s.S.rows();
        return r;
    }

    void flush(std::size_t level) {
        if (buffers_[level].empty()) return;
        if (buffers_[level].size() == 1) {
            // A lone summary gains nothing from another reduce.
            Summary s = std::move(buffers_[level].front());
            buffers_[level].clear();
            buffered_ -= s.S.size();
            push(level + 1, std::move(s));
            return;
        }
        MatrixF merged(0, width_);
        std::size_t depth = 0;
        double product = 1.0;
        for (const auto& s : buffers_[level]) {
            merged.append_rows(s.S);
            depth = std::max(depth, s.depth);
            product = std::max(product, s.product);
            buffered_ -= s.S.size();
        }
        buffers_[level].clear();
        auto out = reduce_block(merged, cfg_.p, cfg_.method, next_seed(),
                                cfg_.distortion_samples);
        rank_flagged_ = rank_flagged_ || out.rank_flagged;
        trace_.push_back(NodeTrace{level + 2, merged.rows(), out.S.rows(),
                                   out.certified_distortion});
        push(level + 1,
             Summary{std::move(out.S), depth + 1, product * out.certified_distortion});
    }

    std::uint64_t next_seed() { return hash_key(cfg_.seed, 0x656e67ULL, node_counter_++); }

    TreeConfig cfg_;
    std::size_t width_;
    std::size_t block_rows_;
    std::vector<std::vector<Summary>> buffers_;
    std::vector<NodeTrace> trace_;
    bool rank_flagged_ = false;
    std::size_t buffered_ = 0;
    std::size_t current_input_ = 0;
    std::size_t peak_ = 0;
    std::uint64_t node_counter_ = 0;
};

}  // namespace

EmbeddingResult subspace_embed(RowBlockStream& stream, const TreeConfig& cfg) {
    cfg.validate(stream.width());
    const std::size_t block_rows =
        cfg.block_rows != 0 ? cfg.block_rows : stream.block_size();
    if (block_rows != stream.block_size()) {
        throw std::invalid_argument(
            "subspace_embed: stream block size must match cfg.block_rows");
    }
    MergeReduceEngine engine(cfg, stream.width(), block_rows);
    while (auto blk = stream.next_block()) {
        engine.consume_leaf(*blk);
    }
    return engine.finish();
}

EmbeddingResult tree_simulate(const MatrixF& a, const TreeConfig& cfg,
                              std::size_t fanout) {
    cfg.validate(a.cols());
    if (fanout == 1) {
        throw std::invalid_argument("tree_simulate: fanout must be 0 or >= 2");
    }
    const std::size_t block_rows = std::max(
        cfg.block_rows != 0 ? cfg.block_rows : derive_block_rows(a.rows(), cfg.gamma),
        a.cols());

    if (fanout == 0) {
        auto stream = block_iter(a, block_rows);
        TreeConfig streamed = cfg;
        streamed.block_rows = block_rows;
        return subspace_embed(stream, streamed);
    }

    std::vector<Summary> level;
    std::vector<NodeTrace> trace;
    bool rank_flagged = false;
    std::uint64_t node = 0;
    for (std::size_t start = 0; start < a.rows(); start += block_rows) {
        const std::size_t take = std::min(block_rows, a.rows() - start);
        MatrixF blk = a.row_block(start, take);
        if (take < a.cols()) {
            level.push_back(Summary{blk, 0, 1.0});
            continue;
        }
        auto out = reduce_block(blk, cfg.p, cfg.method, hash_key(cfg.seed, 0x74726565ULL, node++),
                                cfg.distortion_samples);
        rank_flagged = rank_flagged || out.rank_flagged;
        trace.push_back(NodeTrace{1, take, out.S.rows(), out.certified_distortion});
        level.push_back(Summary{std::move(out.S), 1, out.certified_distortion});
    }
    std::size_t level_index = 1;
    while (level.size() > 1) {
        std::vector<Summary> next;
        for (std::size_t g = 0; g < level.size(); g += fanout) {
            const std::size_t end = std::min(g + fanout, level.size());
            if (end - g == 1) {
                next.push_back(std::move(level[g]));
                continue;
            }
            MatrixF merged(0, a.cols());
            std::size_t depth = 0;
            double product = 1.0;
            for (std::size_t k = g; k < end; ++k) {
                merged.append_rows(level[k].S);
                depth = std::max(depth, level[k].depth);
                product = std::max(product, level[k].product);
            }
            auto out = reduce_block(merged, cfg.p, cfg.method,
                                    hash_key(cfg.seed, 0x74726565ULL, node++),
                                    cfg.distortion_samples);
            rank_flagged = rank_flagged || out.rank_flagged;
            trace.push_back(NodeTrace{level_index + 1, merged.rows(), out.S.rows(),
                                      out.certified_distortion});
            next.push_back(Summary{std::move(out.S), depth + 1,
                                   product * out.certified_distortion});
        }
        level = std::move(next);
        ++level_index;
    }

    EmbeddingResult res;
    res.T = level.empty() ? MatrixF(0, a.cols()) : level.front().S;
    res.levels_used = level.empty() ? 0 : level.front().depth;
    res.certified_lower_product = level.empty() ? 1.0 : level.front().product;
    res.per_level_distortion_bound = static_cast<double>(a.cols());
    res.total_lower_factor =
        std::pow(static_cast<double>(a.cols()), -static_cast<double>(res.levels_used));
    res.trace = std::move(trace);
    res.rank_flagged = rank_flagged;
    res.peak_numbers = 0;  // materialized tree, not a streaming working set
    return res;
}

}  // namespace lpsum
