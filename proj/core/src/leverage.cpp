#include "lpsum/leverage.hpp"

#include <algorithm>
#include <cmath>

#include "eigen_util.hpp"
#include "lpsum/rng.hpp"

namespace lpsum {

std::vector<double> leverage_scores(const WcbFactorization& f) {
    const PNorm p = f.cert.p;
    if (p.is_inf()) {
        throw std::invalid_argument("leverage_scores: finite p required");
    }
    std::vector<double> w(f.U.rows());
    for (std::size_t i = 0; i < f.U.rows(); ++i) {
        w[i] = vector_pnorm_pow(f.U.row(i), p.value());
    }
    return w;
}

std::pair<MatrixF, std::vector<std::size_t>> lev_score_check(
    const WcbFactorization& f, const MatrixF& w, double tau) {
    if (f.U.rows() != w.rows()) {
        throw std::invalid_argument("lev_score_check: basis row count " +
                                    std::to_string(f.U.rows()) + " != matrix rows " +
                                    std::to_string(w.rows()));
    }
    if (tau < 0.0) throw std::invalid_argument("lev_score_check: tau must be >= 0");
    const auto scores = leverage_scores(f);
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] > tau) kept.push_back(i);  // strict: ties are dropped
    }
    return {w.select_rows(kept), kept};
}

namespace detail {

ScoredBasis score_block(const MatrixF& x, PNorm p, WcbMethod method,
                        std::uint64_t seed) {
    ScoredBasis out;
    out.scores.assign(x.rows(), 0.0);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(to_eigen(x));
    qr.setThreshold(1e-10);
    const std::size_t rank = static_cast<std::size_t>(qr.rank());
    out.rank = rank;
    if (rank == 0) {
        out.reduced_rank = true;
        out.cert = WcbCertificate{0.0, 0.0, p, method};
        return out;
    }

    MatrixF work = x;
    if (rank < x.cols()) {
        out.reduced_rank = true;
        std::vector<std::size_t> cols(rank);
        const auto& perm = qr.colsPermutation().indices();
        for (std::size_t k = 0; k < rank; ++k) {
            cols[k] = static_cast<std::size_t>(perm(static_cast<Eigen::Index>(k)));
        }
        std::sort(cols.begin(), cols.end());
        work = x.select_cols(cols);
    }

    WcbFactorization f = make_wcb(work, p, method, seed);
    out.cert = f.cert;
    for (std::size_t i = 0; i < f.U.rows(); ++i) {
        out.scores[i] = vector_pnorm_pow(f.U.row(i), p.value());
    }
    return out;
}

}  // namespace detail

SummaryState stream_high_leverage(RowBlockStream& stream, PNorm p, double tau,
                                  WcbMethod method, std::uint64_t seed) {
    if (p.is_inf()) {
        throw std::invalid_argument("stream_high_leverage: finite p required");
    }
    if (tau <= 0.0) throw std::invalid_argument("stream_high_leverage: tau must be > 0");
    if (stream.block_size() < stream.width()) {
        throw std::invalid_argument("stream_high_leverage: block size below column count");
    }

    const double d = static_cast<double>(stream.width());
    SummaryState st;
    st.B = MatrixF(0, stream.width());
    st.budget_rows = stream.block_size();
    st.tau = tau;

    std::size_t next_origin = 0;
    while (auto blk = stream.next_block()) {
        const std::size_t fresh = blk->rows();
        MatrixF x = *blk;
        x.append_rows(st.B);
        std::vector<std::size_t> origin(x.rows());
        for (std::size_t i = 0; i < fresh; ++i) origin[i] = next_origin + i;
        for (std::size_t i = 0; i < st.origin.size(); ++i) origin[fresh + i] = st.origin[i];
        next_origin += fresh;

        auto sb = detail::score_block(x, p, method, hash_key(seed, st.blocks_processed));
        st.rank_flagged = st.rank_flagged || sb.reduced_rank;
        st.last_cert = sb.cert;
        const double alpha_p = std::pow(sb.cert.alpha, p.value());
        st.adjust = d * alpha_p * sb.cert.beta;
        const double local_tau = tau / st.adjust;

        std::vector<std::size_t> kept;
        for (std::size_t i = 0; i < sb.scores.size(); ++i) {
            if (sb.scores[i] > local_tau) kept.push_back(i);
        }
        // The total score mass is alpha^p, so the kept count has a hard cap.
        const double cap = alpha_p / local_tau;
        st.lemma_cap = std::max(st.lemma_cap, cap);
        if (static_cast<double>(kept.size()) > cap * (1.0 + 1e-9)) {
            throw std::logic_error("stream_high_leverage: retained " +
                                   std::to_string(kept.size()) +
                                   " rows, above the score-mass cap " +
                                   std::to_string(cap));
        }
        st.B = x.select_rows(kept);
        std::vector<std::size_t> new_origin(kept.size());
        std::vector<double> new_scores(kept.size());
        for (std::size_t k = 0; k < kept.size(); ++k) {
            new_origin[k] = origin[kept[k]];
            new_scores[k] = sb.scores[kept[k]];
        }
        st.origin = std::move(new_origin);
        st.kept_scores = std::move(new_scores);
        st.max_rows_after_reduce = std::max(st.max_rows_after_reduce, st.B.rows());
        ++st.blocks_processed;
    }
    return st;
}

LocalGlobalGap local_global_gap(const MatrixF& a,
                                std::span<const std::size_t> block_rows, PNorm p,
                                WcbMethod method, std::uint64_t seed) {
    if (block_rows.empty()) {
        throw std::invalid_argument("local_global_gap: empty block");
    }
    if (p.is_inf()) throw std::invalid_argument("local_global_gap: finite p required");
    WcbFactorization fg = make_wcb(a, p, method, hash_key(seed, 0xf001));
    MatrixF block = a.select_rows(block_rows);
    WcbFactorization fl = make_wcb(block, p, method, hash_key(seed, 0xf002));

    const auto wg = leverage_scores(fg);
    const auto wl = leverage_scores(fl);
    LocalGlobalGap out;
    out.alpha_global = fg.cert.alpha;
    out.beta_local = fl.cert.beta;
    out.drop_factor = static_cast<double>(a.cols()) *
                      std::pow(fg.cert.alpha, p.value()) * fl.cert.beta;
    out.pairs.reserve(block_rows.size());
    for (std::size_t k = 0; k < block_rows.size(); ++k) {
        out.pairs.push_back(LocalGlobalPair{block_rows[k], wg[block_rows[k]], wl[k]});
    }
    return out;
}

std::vector<double> surrogate_scores(const MatrixF& b) {
    double total = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) total += b.data()[i] * b.data()[i];
    if (total == 0.0) {
        throw std::invalid_argument("surrogate_scores: zero matrix");
    }
    std::vector<double> w(b.rows());
    for (std::size_t i = 0; i < b.rows(); ++i) {
        double s = 0.0;
        for (double v : b.row(i)) s += v * v;
        w[i] = s / total;
    }
    return w;
}

SampleResult uniform_sample(RowBlockStream& stream, std::size_t m,
                            std::uint64_t seed) {
    if (m == 0) throw std::invalid_argument("uniform_sample: m must be >= 1");
    Rng rng(seed, 0x73616d70ULL);
    MatrixF reservoir(0, stream.width());
    std::vector<std::size_t> origin;
    std::size_t seen = 0;
    while (auto blk = stream.next_block()) {
        for (std::size_t i = 0; i < blk->rows(); ++i) {
            if (reservoir.rows() < m) {
                reservoir.append_row(blk->row(i));
                origin.push_back(seen);
            } else {
                const std::size_t j = rng.below(seen + 1);
                if (j < m) {
                    auto dst = reservoir.row(j);
                    auto src = blk->row(i);
                    std::copy(src.begin(), src.end(), dst.begin());
                    origin[j] = seen;
                }
            }
            ++seen;
        }
    }
    return SampleResult{std::move(reservoir), std::move(origin)};
}

}  // namespace lpsum
