#include "lpsum/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "eigen_util.hpp"
#include "lpsum/regression.hpp"
#include "lpsum/rng.hpp"

namespace lpsum {

double l1_error(const MatrixF& x, const MatrixF& left, const MatrixF& right) {
    if (left.rows() != x.rows() || right.cols() != x.cols() ||
        left.cols() != right.rows()) {
        throw std::invalid_argument("l1_error: factor shapes disagree");
    }
    double err = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            double v = x(i, j);
            for (std::size_t l = 0; l < left.cols(); ++l) v -= left(i, l) * right(l, j);
            err += std::abs(v);
        }
    }
    return err;
}

namespace {

double weighted_median(std::vector<std::pair<double, double>>& vals) {
    // (value, weight > 0); smallest value whose cumulative weight reaches half.
    if (vals.empty()) return 0.0;
    std::sort(vals.begin(), vals.end());
    double total = 0.0;
    for (const auto& [v, w] : vals) total += w;
    double acc = 0.0;
    for (const auto& [v, w] : vals) {
        acc += w;
        if (acc >= 0.5 * total) return v;
    }
    return vals.back().first;
}

// Exact per-row 1-d ell_1 fit: argmin_u sum_j |x_j - u v_j|.
double l1_fit_1d(std::span<const double> x, std::span<const double> v) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (v[j] != 0.0) pts.emplace_back(x[j] / v[j], std::abs(v[j]));
    }
    return weighted_median(pts);
}

// Small dense ell_1 regression min_q ||M q - t||_1 (k unknowns, k <= 2 here).
std::vector<double> l1_fit_small(const MatrixF& m, const std::vector<double>& t) {
    if (m.cols() == 1) {
        std::vector<double> col(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) col[i] = m(i, 0);
        return {l1_fit_1d(t, col)};
    }
    RegressionInstance inst;
    inst.a = m;
    inst.b = t;
    inst.p = PNorm::of(1.0);
    return solve_lp_regression(inst).x;
}

}  // namespace

double l1_rank_one_optimum(const MatrixF& x, std::size_t restarts, std::size_t iters,
                           std::uint64_t seed) {
    const std::size_t n = x.rows(), d = x.cols();
    if (n == 0 || d == 0) return 0.0;
    Rng rng(seed, 0x726b31ULL);
    double best = entrywise_pnorm(x, PNorm::of(1.0));  // zero factorization

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(detail::to_eigen(x),
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    std::vector<double> u(n), v(d);
    for (std::size_t rs = 0; rs < restarts; ++rs) {
        if (rs == 0) {
            for (std::size_t j = 0; j < d; ++j) v[j] = svd.matrixV()(static_cast<Eigen::Index>(j), 0);
        } else if (rs <= n) {
            for (std::size_t j = 0; j < d; ++j) v[j] = x(rs - 1, j);  // data rows as seeds
            if (vector_pnorm(v, PNorm::of(1.0)) == 0.0) continue;
        } else {
            for (std::size_t j = 0; j < d; ++j) v[j] = rng.normal();
        }
        for (std::size_t it = 0; it < iters; ++it) {
            for (std::size_t i = 0; i < n; ++i) u[i] = l1_fit_1d(x.row(i), v);
            // Columns of X against u.
            std::vector<double> col(n);
            bool changed = false;
            for (std::size_t j = 0; j < d; ++j) {
                for (std::size_t i = 0; i < n; ++i) col[i] = x(i, j);
                const double nv = l1_fit_1d(col, u);
                if (nv != v[j]) changed = true;
                v[j] = nv;
            }
            if (!changed) break;
        }
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < d; ++j) err += std::abs(x(i, j) - u[i] * v[j]);
        }
        best = std::min(best, err);
    }
    return best;
}

WcbDecomposition l1_decompose_wcb(const MatrixF& w) {
    const std::size_t k = w.cols();
    if (k == 0 || w.rows() == 0) {
        throw std::invalid_argument("l1_decompose_wcb: empty input");
    }
    WcbDecomposition out;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(detail::to_eigen(w));
    qr.setThreshold(1e-10);
    const std::size_t rank = static_cast<std::size_t>(qr.rank());
    MatrixF basis_input = w;
    Eigen::MatrixXd z;
    if (rank == 0) {
        out.u = MatrixF(w.rows(), k);
        out.s = MatrixF(k, k);
        out.ratio_lo = out.ratio_hi = 1.0;
        out.flagged = true;
        return out;
    }
    if (rank < k) {
        out.flagged = true;
        std::vector<std::size_t> cols(rank);
        const auto& perm = qr.colsPermutation().indices();
        for (std::size_t i = 0; i < rank; ++i) {
            cols[i] = static_cast<std::size_t>(perm(static_cast<Eigen::Index>(i)));
        }
        std::sort(cols.begin(), cols.end());
        basis_input = w.select_cols(cols);
        Eigen::MatrixXd c = detail::to_eigen(basis_input);
        z = c.colPivHouseholderQr().solve(detail::to_eigen(w));
    }

    WcbFactorization f = (basis_input.cols() == 1 || basis_input.rows() == basis_input.cols())
                             ? make_wcb(basis_input, PNorm::of(1.0), WcbMethod::rounding, 0)
                             : wcb_rounding(basis_input, PNorm::of(1.0));
    out.u = f.U;
    Eigen::MatrixXd s_part = detail::to_eigen(f.S);
    if (rank < k) s_part = s_part * z;
    out.s = MatrixF(k, k);
    for (std::size_t i = 0; i < static_cast<std::size_t>(s_part.rows()); ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            out.s(i, j) = s_part(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }

    // Sampled two-sided agreement between ||Wx||_1 and ||Sx||_1.
    Rng rng(hash_key(w.rows(), w.cols(), 0x7772ULL), 5);
    const PNorm p1 = PNorm::of(1.0);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    std::vector<double> xdir(k);
    for (std::size_t t = 0; t < 400 + 2 * k; ++t) {
        if (t < 2 * k) {
            std::fill(xdir.begin(), xdir.end(), 0.0);
            xdir[t / 2] = (t % 2 == 0) ? 1.0 : -1.0;
        } else {
            for (auto& c : xdir) c = rng.normal();
        }
        const double sw = vector_pnorm(matvec(w, xdir), p1);
        const double ss = vector_pnorm(matvec(out.s, xdir), p1);
        if (ss == 0.0 && sw == 0.0) continue;  // shared null direction
        if (ss == 0.0) continue;               // outside the retained row space
        const double r = sw / ss;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    out.ratio_lo = lo;
    out.ratio_hi = hi;
    const double kk = static_cast<double>(std::max<std::size_t>(rank, 1));
    if (!(lo > 0.0) || hi / lo > 8.0 * kk * kk + 8.0) {
        throw std::logic_error("l1_decompose_wcb: ratio spread " +
                               std::to_string(hi / lo) + " breaks the rank bound");
    }
    return out;
}

namespace {

double pow2_clamp(double w, double floor_val) {
    const double clamped = std::min(1.0, std::max(w, floor_val));
    return std::pow(2.0, std::ceil(std::log2(clamped)));
}

struct Selection {
    std::vector<std::size_t> rows;
    std::vector<double> rescale;  // aligned with rows
};

// Distinct threshold selections of the rounded weights, sizes in [lo, hi].
std::vector<Selection> threshold_selections(const std::vector<double>& rounded,
                                            std::size_t lo, std::size_t hi) {
    std::vector<Selection> out;
    std::vector<std::size_t> last;
    for (double t = 1.0; t >= 0.49 / (1 << 30); t *= 0.5) {
        Selection sel;
        for (std::size_t i = 0; i < rounded.size(); ++i) {
            if (rounded[i] >= t) {
                sel.rows.push_back(i);
                sel.rescale.push_back(1.0);
            }
        }
        if (sel.rows.size() < lo || sel.rows.size() > hi) {
            if (sel.rows.size() > hi) break;  // only grows as t shrinks
            continue;
        }
        if (sel.rows == last) continue;
        last = sel.rows;
        out.push_back(std::move(sel));
    }
    return out;
}

MatrixF select_rescale_rows(const MatrixF& a, const Selection& sel) {
    MatrixF m(sel.rows.size(), a.cols());
    for (std::size_t r = 0; r < sel.rows.size(); ++r) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            m(r, j) = sel.rescale[r] * a(sel.rows[r], j);
        }
    }
    return m;
}

MatrixF select_rescale_cols(const MatrixF& a, const Selection& sel) {
    MatrixF m(a.rows(), sel.rows.size());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t c = 0; c < sel.rows.size(); ++c) {
            m(i, c) = sel.rescale[c] * a(i, sel.rows[c]);
        }
    }
    return m;
}

std::vector<double> rounded_weights(const MatrixF& m, double floor_val) {
    auto lw = detail::lewis_weights_any(m, 1.0, 100, 1e-6);
    std::vector<double> rounded(lw.weights.size());
    for (std::size_t i = 0; i < rounded.size(); ++i) {
        rounded[i] = pow2_clamp(lw.weights[i], floor_val);
    }
    return rounded;
}

struct Candidate {
    MatrixF left;   // n x k
    MatrixF right;  // k x d
};

// Alternating ell_1 fit of X (r x k) and Y (k x m) for the sketched objective
// || M1 X (Y M2) - C ||_1, initialized from the least-squares factor pair.
Candidate fit_candidate(const MatrixF& a_sel, const Selection& d_sel,
                        const MatrixF& m1, const MatrixF& m2, const MatrixF& c,
                        const MatrixF& a, std::size_t k) {
    const std::size_t r = a_sel.cols();
    const std::size_t m = m2.rows();
    const std::size_t t1 = m1.rows(), t2 = m2.cols();

    Eigen::MatrixXd m1e = detail::to_eigen(m1);
    Eigen::MatrixXd m2e = detail::to_eigen(m2);
    Eigen::MatrixXd ce = detail::to_eigen(c);
    Eigen::MatrixXd g =
        m1e.completeOrthogonalDecomposition().pseudoInverse() * ce *
        m2e.completeOrthogonalDecomposition().pseudoInverse();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const std::size_t kk = std::min<std::size_t>(k, static_cast<std::size_t>(svd.rank()));
    Eigen::MatrixXd xe = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r),
                                               static_cast<Eigen::Index>(k));
    Eigen::MatrixXd ye = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                               static_cast<Eigen::Index>(m));
    for (std::size_t l = 0; l < kk; ++l) {
        const double root = std::sqrt(svd.singularValues()(static_cast<Eigen::Index>(l)));
        xe.col(static_cast<Eigen::Index>(l)) =
            svd.matrixU().col(static_cast<Eigen::Index>(l)) * root;
        ye.row(static_cast<Eigen::Index>(l)) =
            svd.matrixV().col(static_cast<Eigen::Index>(l)).transpose() * root;
    }

    auto sketch_error = [&](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
        return (m1e * x * y * m2e - ce).cwiseAbs().sum();
    };
    double err = sketch_error(xe, ye);
    for (int round = 0; round < 10; ++round) {
        // X step: features (a, b) -> m1(i, a) * (Y m2)(b, j).
        Eigen::MatrixXd w2 = ye * m2e;  // k x t2
        MatrixF design(t1 * t2, r * k);
        std::vector<double> target(t1 * t2);
        for (std::size_t i = 0; i < t1; ++i) {
            for (std::size_t j = 0; j < t2; ++j) {
                const std::size_t row = i * t2 + j;
                target[row] = c(i, j);
                for (std::size_t aa = 0; aa < r; ++aa) {
                    for (std::size_t bb = 0; bb < k; ++bb) {
                        design(row, aa * k + bb) =
                            m1(i, aa) * w2(static_cast<Eigen::Index>(bb),
                                           static_cast<Eigen::Index>(j));
                    }
                }
            }
        }
        auto xsol = l1_fit_small(design, target);
        Eigen::MatrixXd xn(r, k);
        for (std::size_t aa = 0; aa < r; ++aa)
            for (std::size_t bb = 0; bb < k; ++bb) xn(aa, bb) = xsol[aa * k + bb];
        if (sketch_error(xn, ye) <= err) {
            xe = xn;
            err = sketch_error(xe, ye);
        }

        // Y step: features (b, l) -> (m1 X)(i, b) * m2(l, j).
        Eigen::MatrixXd z1 = m1e * xe;  // t1 x k
        MatrixF design_y(t1 * t2, k * m);
        for (std::size_t i = 0; i < t1; ++i) {
            for (std::size_t j = 0; j < t2; ++j) {
                const std::size_t row = i * t2 + j;
                for (std::size_t bb = 0; bb < k; ++bb) {
                    for (std::size_t ll = 0; ll < m; ++ll) {
                        design_y(row, bb * m + ll) =
                            z1(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(bb)) *
                            m2(ll, j);
                    }
                }
            }
        }
        auto ysol = l1_fit_small(design_y, target);
        Eigen::MatrixXd yn(k, m);
        for (std::size_t bb = 0; bb < k; ++bb)
            for (std::size_t ll = 0; ll < m; ++ll) yn(bb, ll) = ysol[bb * m + ll];
        const double cand = sketch_error(xe, yn);
        if (cand <= err) {
            const bool progressed = cand < err * (1.0 - 1e-12);
            ye = yn;
            err = cand;
            if (!progressed) break;
        } else {
            break;
        }
    }

    Candidate out;
    // left = (A restricted to the pattern) X, right = Y (D A).
    Eigen::MatrixXd lefte = detail::to_eigen(a_sel) * xe;
    out.left = detail::from_eigen(lefte);
    MatrixF da = select_rescale_rows(a, d_sel);
    out.right = detail::from_eigen(ye * detail::to_eigen(da));
    return out;
}

// Monotone full-matrix refinement of a factor pair by alternating per-row and
// per-column ell_1 fits.
void polish(const MatrixF& a, MatrixF& left, MatrixF& right, double& err,
            int rounds) {
    const std::size_t n = a.rows(), d = a.cols(), k = left.cols();
    for (int round = 0; round < rounds; ++round) {
        MatrixF rt = right.transposed();  // d x k
        MatrixF new_left = left;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> t(d);
            for (std::size_t j = 0; j < d; ++j) t[j] = a(i, j);
            auto q = l1_fit_small(rt, t);
            for (std::size_t l = 0; l < k; ++l) new_left(i, l) = q[l];
        }
        double e1 = l1_error(a, new_left, right);
        if (e1 <= err) {
            left = new_left;
            err = e1;
        }
        MatrixF new_right = right;
        for (std::size_t j = 0; j < d; ++j) {
            std::vector<double> t(n);
            for (std::size_t i = 0; i < n; ++i) t[i] = a(i, j);
            auto q = l1_fit_small(left, t);
            for (std::size_t l = 0; l < k; ++l) new_right(l, j) = q[l];
        }
        double e2 = l1_error(a, left, new_right);
        if (e2 <= err) {
            const bool progressed = e2 < err * (1.0 - 1e-12);
            right = new_right;
            err = e2;
            if (!progressed) break;
        } else {
            break;
        }
    }
}

}  // namespace

LowRankResult l1_rank_k_inner(const MatrixF& x, std::size_t k, InnerMode mode,
                              std::uint64_t seed, const LowRankCaps& caps) {
    const std::size_t n = x.rows(), d = x.cols();
    if (k == 0) throw std::invalid_argument("l1_rank_k_inner: k must be >= 1");
    if (n == 0 || d == 0) {
        throw std::invalid_argument("l1_rank_k_inner: empty input");
    }
    if (mode == InnerMode::enumerated) {
        if (k > 2 || n > caps.cap_n || d > caps.cap_d) {
            throw std::invalid_argument(
                "l1_rank_k_inner: enumerated mode caps exceeded (k <= 2, n <= " +
                std::to_string(caps.cap_n) + ", d <= " + std::to_string(caps.cap_d) +
                "); use randomized mode");
        }
    }

    LowRankResult best;
    best.k = k;
    best.inner_method = mode;
    best.left = MatrixF(n, k);
    best.right = MatrixF(k, d);
    best.l1_error = entrywise_pnorm(x, PNorm::of(1.0));  // zero factorization

    const std::size_t r = std::min(d, 2 * k);
    const double floor_val = 1.0 / (static_cast<double>(n) * static_cast<double>(d));
    const std::size_t m_cap = std::min(n, 8 * r);

    auto consider = [&](Candidate cand) {
        const double err = l1_error(x, cand.left, cand.right);
        if (err < best.l1_error * (1.0 - 1e-15)) {
            best.l1_error = err;
            best.left = std::move(cand.left);
            best.right = std::move(cand.right);
        }
    };

    auto evaluate_tuple = [&](const std::vector<std::size_t>& pattern,
                              const Selection& dsel, const Selection& t1sel,
                              const Selection& t2sel) {
        MatrixF a_sel = x.select_cols(pattern);
        MatrixF m1 = select_rescale_rows(a_sel, t1sel);  // T1 A R
        MatrixF da = select_rescale_rows(x, dsel);
        MatrixF m2 = select_rescale_cols(da, t2sel);
        MatrixF c = select_rescale_cols(select_rescale_rows(x, t1sel), t2sel);
        consider(fit_candidate(a_sel, dsel, m1, m2, c, x, k));
    };

    if (mode == InnerMode::enumerated) {
        // Lexicographic walk over column patterns.
        std::vector<std::size_t> pattern(r);
        for (std::size_t j = 0; j < r; ++j) pattern[j] = j;
        while (true) {
            MatrixF a_sel = x.select_cols(pattern);
            if (detail::numerical_rank(a_sel) >= std::min(k, r)) {
                auto rounded = rounded_weights(a_sel, floor_val);
                auto row_sels = threshold_selections(rounded, std::max<std::size_t>(k, 1), m_cap);
                Selection full_rows;
                for (std::size_t i = 0; i < n; ++i) {
                    full_rows.rows.push_back(i);
                    full_rows.rescale.push_back(1.0);
                }
                std::vector<Selection> t1_family = row_sels;
                t1_family.push_back(full_rows);
                for (const auto& dsel : row_sels) {
                    MatrixF da = select_rescale_rows(x, dsel);
                    auto col_rounded = rounded_weights(da.transposed(), floor_val);
                    auto t2_sels = threshold_selections(col_rounded, std::max<std::size_t>(k, 1), d);
                    Selection full_cols;
                    for (std::size_t j = 0; j < d; ++j) {
                        full_cols.rows.push_back(j);
                        full_cols.rescale.push_back(1.0);
                    }
                    t2_sels.push_back(full_cols);
                    for (const auto& t1sel : t1_family) {
                        for (const auto& t2sel : t2_sels) {
                            evaluate_tuple(pattern, dsel, t1sel, t2sel);
                        }
                    }
                }
            }
            // next combination
            std::size_t kk = r;
            while (kk > 0 && pattern[kk - 1] == d - r + (kk - 1)) --kk;
            if (kk == 0) break;
            ++pattern[kk - 1];
            for (std::size_t jj = kk; jj < r; ++jj) pattern[jj] = pattern[jj - 1] + 1;
        }
    } else {
        for (std::size_t candi = 0; candi < caps.max_candidates; ++candi) {
            Rng rng(hash_key(seed, 0x6c6f77ULL, candi), 0);
            // Random column pattern of size r.
            std::vector<std::size_t> cols(d);
            std::iota(cols.begin(), cols.end(), 0);
            for (std::size_t j = 0; j < r; ++j) {
                std::swap(cols[j], cols[j + rng.below(d - j)]);
            }
            std::vector<std::size_t> pattern(cols.begin(), cols.begin() + r);
            std::sort(pattern.begin(), pattern.end());
            MatrixF a_sel = x.select_cols(pattern);
            if (detail::numerical_rank(a_sel) < std::min(k, r)) continue;

            auto rounded = rounded_weights(a_sel, floor_val);
            auto draw_rows = [&](Rng& r2) {
                Selection sel;
                for (std::size_t i = 0; i < n; ++i) {
                    const double p = rounded[i];
                    if (r2.uniform() < p) {
                        sel.rows.push_back(i);
                        sel.rescale.push_back(1.0 / p);
                    }
                }
                return sel;
            };
            Selection dsel = draw_rows(rng);
            Selection t1sel = draw_rows(rng);
            if (dsel.rows.size() < k || t1sel.rows.size() < k) continue;
            MatrixF da = select_rescale_rows(x, dsel);
            auto col_rounded = rounded_weights(da.transposed(), floor_val);
            Selection t2sel;
            for (std::size_t j = 0; j < d; ++j) {
                const double p = col_rounded[j];
                if (rng.uniform() < p) {
                    t2sel.rows.push_back(j);
                    t2sel.rescale.push_back(1.0 / p);
                }
            }
            if (t2sel.rows.size() < k) continue;
            evaluate_tuple(pattern, dsel, t1sel, t2sel);
        }
    }

    polish(x, best.left, best.right, best.l1_error, 5);
    best.rank_padded = detail::numerical_rank(best.left) < k;
    return best;
}

LowRankResult l1_lowrank_tree(RowBlockStream& pass1, RowBlockStream& pass2,
                              std::size_t k, const TreeConfig& cfg, InnerMode mode,
                              std::uint64_t seed, const LowRankCaps& caps) {
    const std::size_t d = pass1.width();
    if (pass2.width() != d) {
        throw std::invalid_argument("l1_lowrank_tree: pass widths disagree");
    }
    const std::size_t block_rows = std::max(
        cfg.block_rows != 0 ? cfg.block_rows : derive_block_rows(64, cfg.gamma),
        std::max(d, k));

    bool padded = false;
    std::uint64_t node = 0;
    auto reduce_group = [&](const MatrixF& grp) -> MatrixF {
        auto inner = l1_rank_k_inner(grp, k, mode, hash_key(seed, 0x747265ULL, node++), caps);
        padded = padded || inner.rank_padded;
        if (detail::numerical_rank(inner.left) == 0) {
            return MatrixF(k, d);  // zero directions
        }
        auto dec = l1_decompose_wcb(inner.left);
        padded = padded || dec.flagged;
        return matmul(dec.s, inner.right);  // k x d directions
    };

    // Eager per-level buffers of k x d summaries.
    std::vector<std::vector<MatrixF>> buffers;
    std::function<void(std::size_t, MatrixF)> push = [&](std::size_t level, MatrixF s) {
        if (level >= buffers.size()) buffers.resize(level + 1);
        std::size_t rows = 0;
        for (const auto& m : buffers[level]) rows += m.rows();
        if (rows + s.rows() > block_rows && !buffers[level].empty()) {
            MatrixF merged(0, d);
            for (auto& m : buffers[level]) merged.append_rows(m);
            buffers[level].clear();
            push(level + 1, reduce_group(merged));
        }
        buffers[level].push_back(std::move(s));
    };

    while (auto blk = pass1.next_block()) {
        if (blk->rows() < std::max<std::size_t>(k, 1)) {
            push(0, *blk);  // short leftover joins the next merge unreduced
        } else {
            push(0, reduce_group(*blk));
        }
    }
    MatrixF pooled(0, d);
    for (std::size_t l = buffers.size(); l-- > 0;) {
        for (auto& m : buffers[l]) pooled.append_rows(m);
    }
    MatrixF p = pooled.rows() > k ? reduce_group(pooled) : pooled;
    if (p.rows() < k) {
        MatrixF padded_p(k, d);
        for (std::size_t i = 0; i < p.rows(); ++i) {
            for (std::size_t j = 0; j < d; ++j) padded_p(i, j) = p(i, j);
        }
        p = padded_p;
        padded = true;
    }

    // Second pass: Q = argmin ||Q P - A||_1 row by row.
    LowRankResult out;
    out.k = k;
    out.inner_method = mode;
    out.right = p;
    out.left = MatrixF(0, k);
    out.rank_padded = padded;
    MatrixF pt = p.transposed();  // d x k
    double err = 0.0;
    while (auto blk = pass2.next_block()) {
        for (std::size_t i = 0; i < blk->rows(); ++i) {
            std::vector<double> t(d);
            for (std::size_t j = 0; j < d; ++j) t[j] = (*blk)(i, j);
            auto q = l1_fit_small(pt, t);
            out.left.append_row(q);
            for (std::size_t j = 0; j < d; ++j) {
                double v = t[j];
                for (std::size_t l = 0; l < k; ++l) v -= q[l] * p(l, j);
                err += std::abs(v);
            }
        }
    }
    out.l1_error = err;
    return out;
}

}  // namespace lpsum
