#include "lpsum/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eigen_util.hpp"
#include "lpsum/rng.hpp"
#include "lpsum/simplex.hpp"

namespace lpsum {

void RegressionInstance::validate() const {
    if (a.rows() != b.size()) {
        throw std::invalid_argument("RegressionInstance: row counts disagree");
    }
    for (double v : b) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("RegressionInstance: non-finite target");
        }
    }
}

double residual_norm(const RegressionInstance& inst, std::span<const double> x) {
    auto ax = matvec(inst.a, x);
    for (std::size_t i = 0; i < ax.size(); ++i) ax[i] -= inst.b[i];
    return vector_pnorm(ax, inst.p);
}

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

RegressionSolution solve_l2(const RegressionInstance& inst) {
    Eigen::MatrixXd a = detail::to_eigen(inst.a);
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(inst.b.data(),
                                                          static_cast<Eigen::Index>(inst.b.size()));
    Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
    RegressionSolution sol;
    sol.x = to_std(x);
    sol.objective = residual_norm(inst, sol.x);
    sol.method = "l2-qr";
    sol.iterations = 1;
    return sol;
}

// min 1.t s.t. -t <= Ax - b <= t, solved through its d-row dual
// max b.nu s.t. A^T nu = 0, -1 <= nu <= 1 (shifted to box [0, 2]).
RegressionSolution solve_l1(const RegressionInstance& inst) {
    const std::size_t n = inst.a.rows(), d = inst.a.cols();
    SimplexProblem lp;
    lp.e = inst.a.transposed();  // d x n
    lp.g.assign(d, 0.0);
    for (std::size_t r = 0; r < d; ++r) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += inst.a(i, r);
        lp.g[r] = s;  // A^T 1
    }
    lp.cost.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) lp.cost[i] = -inst.b[i];
    lp.upper.assign(n, 2.0);

    auto res = solve_simplex(lp);
    RegressionSolution sol;
    sol.method = "l1-lp";
    sol.iterations = res.iterations;
    if (res.status != SimplexStatus::optimal) {
        sol.converged = false;
        sol.x.assign(d, 0.0);
        sol.objective = residual_norm(inst, sol.x);
        return sol;
    }
    // Multipliers of A^T nu = A^T 1 rows recover x up to sign: for a basic
    // nu_i strictly inside the box the residual a_i.x - b_i vanishes and the
    // optimality condition reads a_i.(-y) = b_i.
    sol.x.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) sol.x[j] = -res.y[j];
    sol.objective = residual_norm(inst, sol.x);
    return sol;
}

// Smoothed p-norm objective sum (r_i^2 + delta^2)^{p/2}.
double smoothed_objective(const RegressionInstance& inst, const Eigen::VectorXd& x,
                          double delta) {
    Eigen::MatrixXd a = detail::to_eigen(inst.a);
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(inst.b.data(),
                                                          static_cast<Eigen::Index>(inst.b.size()));
    Eigen::VectorXd r = a * x - b;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        acc += std::pow(r(i) * r(i) + delta * delta, inst.p.value() / 2.0);
    }
    return acc;
}

RegressionSolution solve_irls(const RegressionInstance& inst, double tol,
                              std::size_t max_iter) {
    const double pv = inst.p.value();
    Eigen::MatrixXd a = detail::to_eigen(inst.a);
    Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(inst.b.data(),
                                                          static_cast<Eigen::Index>(inst.b.size()));
    RegressionSolution sol;
    sol.method = "irls";

    const double bnorm = vector_pnorm(inst.b, inst.p);
    if (bnorm == 0.0) {
        sol.x.assign(inst.a.cols(), 0.0);
        sol.objective = 0.0;
        return sol;
    }

    Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
    double delta = 1e-6 * bnorm;
    const double delta_floor = 1e-14 * bnorm;
    double smoothed = smoothed_objective(inst, x, delta);
    double prev_true = residual_norm(inst, to_std(x));

    std::size_t it = 0;
    for (; it < max_iter; ++it) {
        Eigen::VectorXd r = a * x - b;
        Eigen::VectorXd w(r.size());
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            w(i) = std::pow(r(i) * r(i) + delta * delta, (pv - 2.0) / 4.0);
        }
        // Weighted least squares via row scaling (w holds sqrt weights).
        Eigen::MatrixXd aw = w.asDiagonal() * a;
        Eigen::VectorXd bw = w.asDiagonal() * b;
        Eigen::VectorXd target = aw.colPivHouseholderQr().solve(bw);

        // Backtracking keeps the smoothed objective non-increasing for every p.
        double step = 1.0;
        Eigen::VectorXd next = x;
        double next_obj = smoothed;
        for (int half = 0; half < 40; ++half) {
            Eigen::VectorXd cand = x + step * (target - x);
            const double cand_obj = smoothed_objective(inst, cand, delta);
            if (cand_obj <= smoothed * (1.0 + 1e-15)) {
                next = cand;
                next_obj = cand_obj;
                break;
            }
            step *= 0.5;
        }
        if (next_obj > smoothed * (1.0 + 1e-12)) {
            throw std::logic_error("irls: smoothed objective increased");
        }
        const bool stalled = next_obj > smoothed * (1.0 - 0.1 * tol);
        x = next;
        smoothed = next_obj;

        const double cur_true = residual_norm(inst, to_std(x));
        const bool progressed =
            std::abs(prev_true - cur_true) > tol * std::max(1e-300, prev_true);
        prev_true = cur_true;
        if (stalled || !progressed) {
            if (delta <= delta_floor) {
                ++it;
                break;
            }
            delta *= 0.5;  // sharpen the smoothing once progress stops
            smoothed = smoothed_objective(inst, x, delta);
        }
    }
    sol.x = to_std(x);
    sol.objective = residual_norm(inst, sol.x);
    sol.iterations = it;
    sol.converged = it < max_iter;
    return sol;
}

}  // namespace

RegressionSolution solve_lp_regression(const RegressionInstance& inst, double tol,
                                       std::size_t max_iter) {
    inst.validate();
    if (inst.p.is_inf()) {
        throw std::invalid_argument("solve_lp_regression: use solve_linf_exact");
    }
    const double pv = inst.p.value();
    if (pv == 2.0) return solve_l2(inst);
    if (pv == 1.0) return solve_l1(inst);
    return solve_irls(inst, tol, max_iter);
}

RegressionSolution solve_linf_exact(const RegressionInstance& inst) {
    inst.validate();
    const std::size_t n = inst.a.rows(), d = inst.a.cols();
    RegressionSolution sol;
    sol.method = "linf-lp";
    if (n == 0) {
        sol.x.assign(d, 0.0);
        sol.objective = 0.0;
        return sol;
    }
    // Dual: min b.(lambda+ - lambda-) s.t. A^T(lambda+ - lambda-) = 0,
    // 1.(lambda+ + lambda-) = 1, lambda >= 0. The d+1 row multipliers are
    // (x, -z) of the Chebyshev problem.
    SimplexProblem lp;
    lp.e = MatrixF(d + 1, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            lp.e(j, i) = inst.a(i, j);
            lp.e(j, n + i) = -inst.a(i, j);
        }
        lp.e(d, i) = 1.0;
        lp.e(d, n + i) = 1.0;
    }
    lp.g.assign(d + 1, 0.0);
    lp.g[d] = 1.0;
    lp.cost.assign(2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        lp.cost[i] = inst.b[i];
        lp.cost[n + i] = -inst.b[i];
    }
    lp.upper.assign(2 * n, std::numeric_limits<double>::infinity());

    auto res = solve_simplex(lp);
    sol.iterations = res.iterations;
    if (res.status != SimplexStatus::optimal) {
        throw std::runtime_error("solve_linf_exact: simplex stalled (status " +
                                 std::to_string(static_cast<int>(res.status)) + ")");
    }
    sol.x.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) sol.x[j] = res.y[j];
    sol.objective = residual_norm({inst.a, inst.b, PNorm::inf()}, sol.x);
    return sol;
}

RegressionSolution regress_via_embedding(const RegressionInstance& inst,
                                         TreeConfig cfg) {
    inst.validate();
    const std::size_t n = inst.a.rows(), d = inst.a.cols();
    MatrixF z(n, d + 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) z(i, j) = inst.a(i, j);
        z(i, d) = inst.b[i];
    }
    cfg.p = inst.p;
    if (cfg.block_rows == 0) cfg.block_rows = derive_block_rows(n, cfg.gamma);
    cfg.block_rows = std::max(cfg.block_rows, d + 1);
    auto stream = block_iter(z, cfg.block_rows);
    auto embed = subspace_embed(stream, cfg);

    RegressionInstance reduced;
    reduced.a = MatrixF(embed.T.rows(), d);
    reduced.b.assign(embed.T.rows(), 0.0);
    for (std::size_t i = 0; i < embed.T.rows(); ++i) {
        for (std::size_t j = 0; j < d; ++j) reduced.a(i, j) = embed.T(i, j);
        reduced.b[i] = embed.T(i, d);
    }
    reduced.p = inst.p;
    RegressionSolution sol = solve_lp_regression(reduced, 1e-12, 400);
    sol.method = "embed+" + sol.method;
    sol.objective = residual_norm(inst, sol.x);  // report on the full data
    sol.certified_gap = embed.certified_lower_product;
    return sol;
}

LinfStreamResult linf_additive_stream(RowBlockStream& stream, PNorm p, double eps,
                                      WcbMethod method, std::uint64_t seed) {
    if (p.is_inf()) {
        throw std::invalid_argument("linf_additive_stream: finite p required");
    }
    if (!(eps > 0.0) || !(eps < 1.0)) {
        throw std::invalid_argument("linf_additive_stream: eps must lie in (0, 1)");
    }
    const std::size_t width = stream.width();
    if (width < 2) {
        throw std::invalid_argument("linf_additive_stream: stream must carry [A | b]");
    }
    const std::size_t d = width - 1;
    const double dd = static_cast<double>(d);

    LinfStreamResult out;
    out.summary.B = MatrixF(0, width);
    out.summary.budget_rows = stream.block_size();
    out.summary.tau = eps;

    double b_mass_pow = 0.0;  // running sum |b_i|^p
    std::size_t next_origin = 0;
    std::vector<std::size_t> col_idx(d);
    for (std::size_t j = 0; j < d; ++j) col_idx[j] = j;

    while (auto blk = stream.next_block()) {
        const std::size_t fresh = blk->rows();
        for (std::size_t i = 0; i < fresh; ++i) {
            b_mass_pow += std::pow(std::abs((*blk)(i, d)), p.value());
        }
        const double b_norm = std::pow(b_mass_pow, 1.0 / p.value());

        MatrixF x = *blk;
        x.append_rows(out.summary.B);
        std::vector<std::size_t> origin(x.rows());
        for (std::size_t i = 0; i < fresh; ++i) origin[i] = next_origin + i;
        for (std::size_t i = 0; i < out.summary.origin.size(); ++i) {
            origin[fresh + i] = out.summary.origin[i];
        }
        next_origin += fresh;

        MatrixF design = x.select_cols(col_idx);
        auto sb = detail::score_block(design, p, method,
                                      hash_key(seed, out.summary.blocks_processed));
        out.summary.rank_flagged = out.summary.rank_flagged || sb.reduced_rank;
        out.summary.last_cert = sb.cert;
        const double alpha_p = std::pow(sb.cert.alpha, p.value());
        out.summary.adjust = dd * alpha_p * sb.cert.beta;
        const double local_tau = eps / out.summary.adjust;

        std::vector<std::size_t> kept;
        std::size_t lev_kept = 0, b_kept = 0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            const bool lev = sb.scores[i] > local_tau;
            const bool heavy_b = std::abs(x(i, d)) > eps * b_norm;
            if (lev) ++lev_kept;
            if (heavy_b) ++b_kept;
            if (lev || heavy_b) kept.push_back(i);
        }
        out.kept_by_leverage = lev_kept;
        out.kept_by_b = b_kept;
        out.summary.B = x.select_rows(kept);
        std::vector<std::size_t> new_origin(kept.size());
        for (std::size_t k = 0; k < kept.size(); ++k) new_origin[k] = origin[kept[k]];
        out.summary.origin = std::move(new_origin);
        out.summary.max_rows_after_reduce =
            std::max(out.summary.max_rows_after_reduce, out.summary.B.rows());
        ++out.summary.blocks_processed;
        out.b_norm_estimate = b_norm;
    }

    RegressionInstance reduced;
    reduced.p = PNorm::inf();
    reduced.a = out.summary.B.select_cols(col_idx);
    reduced.b.assign(out.summary.B.rows(), 0.0);
    for (std::size_t i = 0; i < out.summary.B.rows(); ++i) {
        reduced.b[i] = out.summary.B(i, d);
    }
    if (reduced.a.rows() == 0) {
        out.solution.x.assign(d, 0.0);
        out.solution.objective = 0.0;
        out.solution.method = "linf-stream";
        return out;
    }
    out.solution = solve_linf_exact(reduced);
    out.solution.method = "linf-stream";
    return out;
}

}  // namespace lpsum
