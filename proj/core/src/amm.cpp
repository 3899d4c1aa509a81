#include "lpsum/amm.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lpsum/pnorm.hpp"

namespace lpsum {

namespace {

void check_eps(double eps) {
    if (!(eps > 0.0) || !(eps < 2.0)) {
        throw std::invalid_argument("thresholding needs eps in (0, 2)");
    }
}

}  // namespace

ThresholdedVector threshold_vector(std::span<const double> x, double eps,
                                   double ref_norm) {
    check_eps(eps);
    ThresholdedVector out;
    out.eps = eps;
    out.norm1_reference = ref_norm;
    const double cut = 0.5 * eps * ref_norm;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i]) > cut) out.kept.emplace_back(i, x[i]);
    }
    return out;
}

double sketch_inner_product(std::span<const double> x, std::span<const double> y,
                            double eps) {
    check_eps(eps);
    if (x.size() != y.size()) {
        throw std::invalid_argument("sketch_inner_product: length mismatch");
    }
    const auto xb = threshold_vector(x, eps, vector_pnorm(x, PNorm::of(1.0)));
    const auto yb = threshold_vector(y, eps, vector_pnorm(y, PNorm::of(1.0)));
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < xb.kept.size() && j < yb.kept.size()) {
        if (xb.kept[i].first < yb.kept[j].first) {
            ++i;
        } else if (xb.kept[i].first > yb.kept[j].first) {
            ++j;
        } else {
            acc += xb.kept[i].second * yb.kept[j].second;
            ++i;
            ++j;
        }
    }
    return acc;
}

AmmSketch amm_rowwise(const MatrixF& a, const MatrixF& b, double eps) {
    check_eps(eps);
    if (a.cols() != b.cols()) {
        throw std::invalid_argument("amm_rowwise: column counts disagree");
    }
    AmmSketch out;
    out.eps = eps;
    out.a_rows = a.rows();
    out.a_cols = a.cols();
    out.b_rows = b.rows();
    out.b_cols = b.cols();
    out.a.reserve(a.rows());
    out.b.reserve(b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        out.a.push_back(threshold_vector(a.row(i), eps, vector_pnorm(a.row(i), PNorm::of(1.0))));
    }
    for (std::size_t i = 0; i < b.rows(); ++i) {
        out.b.push_back(threshold_vector(b.row(i), eps, vector_pnorm(b.row(i), PNorm::of(1.0))));
    }
    out.error_bound =
        eps * entrywise_pnorm(a, PNorm::of(1.0)) * entrywise_pnorm(b, PNorm::of(1.0));
    return out;
}

namespace {

struct ColumnScan {
    std::vector<double> norms;                   // running column ell_1 norms
    std::vector<ThresholdedVector> kept;         // per column, indexed by row
    std::size_t rows = 0;

    explicit ColumnScan(std::size_t cols, double eps) : norms(cols, 0.0) {
        kept.resize(cols);
        for (auto& k : kept) k.eps = eps;
    }

    void absorb(const MatrixF& block, double eps) {
        for (std::size_t r = 0; r < block.rows(); ++r, ++rows) {
            for (std::size_t j = 0; j < norms.size(); ++j) {
                const double v = block(r, j);
                norms[j] += std::abs(v);
                if (std::abs(v) > 0.5 * eps * norms[j]) {
                    kept[j].kept.emplace_back(rows, v);
                }
            }
        }
    }

    void finalize(double eps) {
        for (std::size_t j = 0; j < norms.size(); ++j) {
            auto& vec = kept[j];
            vec.norm1_reference = norms[j];
            const double cut = 0.5 * eps * norms[j];
            std::erase_if(vec.kept, [&](const auto& e) { return std::abs(e.second) <= cut; });
        }
    }

    double total_norm() const {
        double s = 0.0;
        for (double n : norms) s += n;
        return s;
    }
};

}  // namespace

AmmSketch amm_streaming_columns(RowBlockStream& stream_a, RowBlockStream& stream_b,
                                double eps) {
    check_eps(eps);
    ColumnScan sa(stream_a.width(), eps), sb(stream_b.width(), eps);
    // Independent single passes; synchronized arrival would interleave the
    // same updates and produce the same state.
    while (auto blk = stream_a.next_block()) sa.absorb(*blk, eps);
    while (auto blk = stream_b.next_block()) sb.absorb(*blk, eps);
    sa.finalize(eps);
    sb.finalize(eps);

    AmmSketch out;
    out.columnwise = true;
    out.eps = eps;
    out.a_rows = sa.rows;
    out.a_cols = stream_a.width();
    out.b_rows = sb.rows;
    out.b_cols = stream_b.width();
    out.error_bound = eps * sa.total_norm() * sb.total_norm();
    out.a = std::move(sa.kept);
    out.b = std::move(sb.kept);
    return out;
}

MatrixF densify(const std::vector<ThresholdedVector>& vecs, std::size_t dim,
                bool vectors_are_columns) {
    MatrixF m = vectors_are_columns ? MatrixF(dim, vecs.size()) : MatrixF(vecs.size(), dim);
    for (std::size_t k = 0; k < vecs.size(); ++k) {
        for (const auto& [idx, val] : vecs[k].kept) {
            if (vectors_are_columns) {
                m(idx, k) = val;
            } else {
                m(k, idx) = val;
            }
        }
    }
    return m;
}

std::string sparse_triples_csv(const AmmSketch& sketch) {
    std::ostringstream out;
    out.precision(17);
    auto emit = [&](const std::vector<ThresholdedVector>& vecs, const char* tag) {
        for (std::size_t k = 0; k < vecs.size(); ++k) {
            for (const auto& [idx, val] : vecs[k].kept) {
                const std::size_t i = sketch.columnwise ? idx : k;
                const std::size_t j = sketch.columnwise ? k : idx;
                out << tag << ',' << i << ',' << j << ',' << val << '\n';
            }
        }
    };
    emit(sketch.a, "A");
    emit(sketch.b, "B");
    return out.str();
}

}  // namespace lpsum
