#include "lpsum/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eigen_util.hpp"

namespace lpsum {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Tableau {
    Eigen::MatrixXd e;               // m x (n + m), artificials appended
    Eigen::VectorXd rhs;             // m, normalized nonnegative
    std::vector<double> upper;       // n + m
    std::vector<std::size_t> basis;  // m basic columns
    std::vector<char> at_upper;      // nonbasic bound flags
    std::vector<char> is_basic;
    Eigen::VectorXd v;  // variable values at the last optimum
    Eigen::VectorXd y;  // row multipliers at the last optimum
};

SimplexStatus run_phase(Tableau& t, const Eigen::VectorXd& cost, std::size_t max_iter,
                        double tol, std::size_t& iters) {
    const std::size_t m = static_cast<std::size_t>(t.e.rows());
    const std::size_t cols = static_cast<std::size_t>(t.e.cols());

    std::size_t degenerate_streak = 0;
    double last_objective = kInf;

    for (;; ++iters) {
        if (iters >= max_iter) return SimplexStatus::iteration_limit;

        Eigen::MatrixXd b(m, m);
        for (std::size_t r = 0; r < m; ++r) {
            b.col(static_cast<Eigen::Index>(r)) =
                t.e.col(static_cast<Eigen::Index>(t.basis[r]));
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);

        Eigen::VectorXd rhs_eff = t.rhs;
        for (std::size_t j = 0; j < cols; ++j) {
            if (!t.is_basic[j] && t.at_upper[j]) {
                rhs_eff -= t.e.col(static_cast<Eigen::Index>(j)) * t.upper[j];
            }
        }
        Eigen::VectorXd xb = lu.solve(rhs_eff);

        Eigen::VectorXd cb(m);
        for (std::size_t r = 0; r < m; ++r) {
            cb(static_cast<Eigen::Index>(r)) = cost(static_cast<Eigen::Index>(t.basis[r]));
        }
        Eigen::VectorXd y = lu.transpose().solve(cb);

        double objective = cb.dot(xb);
        for (std::size_t j = 0; j < cols; ++j) {
            if (!t.is_basic[j] && t.at_upper[j]) {
                objective += cost(static_cast<Eigen::Index>(j)) * t.upper[j];
            }
        }
        const bool stalled =
            objective > last_objective - 1e-13 * (1.0 + std::abs(objective));
        degenerate_streak = stalled ? degenerate_streak + 1 : 0;
        last_objective = std::min(last_objective, objective);
        const bool bland = degenerate_streak > 40;

        std::ptrdiff_t enter = -1;
        double best_violation = tol;
        int enter_dir = +1;
        for (std::size_t j = 0; j < cols; ++j) {
            if (t.is_basic[j]) continue;
            if (t.upper[j] == 0.0) continue;  // pinned
            const double r = cost(static_cast<Eigen::Index>(j)) -
                             y.dot(t.e.col(static_cast<Eigen::Index>(j)));
            double violation = 0.0;
            int dir = 0;
            if (!t.at_upper[j] && r < -tol) {
                violation = -r;
                dir = +1;
            } else if (t.at_upper[j] && r > tol) {
                violation = r;
                dir = -1;
            }
            if (dir == 0) continue;
            if (bland) {
                enter = static_cast<std::ptrdiff_t>(j);
                enter_dir = dir;
                break;
            }
            if (violation > best_violation) {
                best_violation = violation;
                enter = static_cast<std::ptrdiff_t>(j);
                enter_dir = dir;
            }
        }
        if (enter < 0) {
            t.v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols));
            for (std::size_t j = 0; j < cols; ++j) {
                if (!t.is_basic[j] && t.at_upper[j]) {
                    t.v(static_cast<Eigen::Index>(j)) = t.upper[j];
                }
            }
            for (std::size_t r = 0; r < m; ++r) {
                t.v(static_cast<Eigen::Index>(t.basis[r])) =
                    xb(static_cast<Eigen::Index>(r));
            }
            t.y = y;
            return SimplexStatus::optimal;
        }

        // Movement of basic values per unit step of the entering variable.
        Eigen::VectorXd delta =
            lu.solve(t.e.col(static_cast<Eigen::Index>(enter))) *
            static_cast<double>(-enter_dir);

        double best_step = t.upper[static_cast<std::size_t>(enter)];  // bound flip
        std::ptrdiff_t leave = -1;
        bool leave_to_upper = false;
        for (std::size_t r = 0; r < m; ++r) {
            const double d = delta(static_cast<Eigen::Index>(r));
            const double xv = xb(static_cast<Eigen::Index>(r));
            const double ub = t.upper[t.basis[r]];
            double step = kInf;
            bool to_upper = false;
            if (d < -1e-12) {
                step = std::max(0.0, xv / (-d));
            } else if (d > 1e-12 && std::isfinite(ub)) {
                step = std::max(0.0, (ub - xv) / d);
                to_upper = true;
            } else {
                continue;
            }
            const bool better = step < best_step - 1e-15;
            const bool tie = leave >= 0 && step <= best_step + 1e-15;
            if (better || (tie && bland &&
                           t.basis[r] < t.basis[static_cast<std::size_t>(leave)])) {
                best_step = step;
                leave = static_cast<std::ptrdiff_t>(r);
                leave_to_upper = to_upper;
            }
        }
        if (!std::isfinite(best_step)) {
            return SimplexStatus::iteration_limit;  // unbounded ray
        }

        if (leave < 0) {
            // The entering variable runs all the way to its other bound.
            const auto j = static_cast<std::size_t>(enter);
            t.at_upper[j] = t.at_upper[j] ? 0 : 1;
            continue;
        }
        const std::size_t out = t.basis[static_cast<std::size_t>(leave)];
        t.is_basic[out] = 0;
        t.at_upper[out] = leave_to_upper ? 1 : 0;
        t.basis[static_cast<std::size_t>(leave)] = static_cast<std::size_t>(enter);
        t.is_basic[static_cast<std::size_t>(enter)] = 1;
        t.at_upper[static_cast<std::size_t>(enter)] = 0;
    }
}

}  // namespace

SimplexResult solve_simplex(const SimplexProblem& prob, std::size_t max_iter, double tol) {
    const std::size_t m = prob.e.rows();
    const std::size_t n = prob.e.cols();
    if (prob.g.size() != m || prob.cost.size() != n || prob.upper.size() != n) {
        throw std::invalid_argument("solve_simplex: inconsistent problem sizes");
    }

    Tableau t;
    t.e = Eigen::MatrixXd(m, n + m);
    t.e.leftCols(static_cast<Eigen::Index>(n)) = detail::to_eigen(prob.e);
    t.rhs = Eigen::VectorXd(m);
    std::vector<double> row_sign(m, 1.0);
    for (std::size_t r = 0; r < m; ++r) {
        t.rhs(static_cast<Eigen::Index>(r)) = prob.g[r];
    }
    for (std::size_t r = 0; r < m; ++r) {
        if (t.rhs(static_cast<Eigen::Index>(r)) < 0.0) {
            row_sign[r] = -1.0;
            t.rhs(static_cast<Eigen::Index>(r)) *= -1.0;
            t.e.row(static_cast<Eigen::Index>(r)).leftCols(static_cast<Eigen::Index>(n)) *=
                -1.0;
        }
    }
    t.e.rightCols(static_cast<Eigen::Index>(m)) = Eigen::MatrixXd::Identity(m, m);
    t.upper = prob.upper;
    t.upper.resize(n + m, kInf);
    t.at_upper.assign(n + m, 0);
    t.is_basic.assign(n + m, 0);
    t.basis.resize(m);
    for (std::size_t r = 0; r < m; ++r) {
        t.basis[r] = n + r;
        t.is_basic[n + r] = 1;
    }

    SimplexResult res;

    Eigen::VectorXd phase1_cost = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + m));
    for (std::size_t j = n; j < n + m; ++j) {
        phase1_cost(static_cast<Eigen::Index>(j)) = 1.0;
    }
    auto st = run_phase(t, phase1_cost, max_iter, tol, res.iterations);
    if (st != SimplexStatus::optimal) {
        res.status = st;
        return res;
    }
    double artificial_mass = 0.0;
    for (std::size_t j = n; j < n + m; ++j) {
        artificial_mass += std::abs(t.v(static_cast<Eigen::Index>(j)));
    }
    const double scale = 1.0 + t.rhs.cwiseAbs().maxCoeff();
    if (artificial_mass > tol * scale) {
        res.status = SimplexStatus::infeasible;
        return res;
    }
    for (std::size_t j = n; j < n + m; ++j) t.upper[j] = 0.0;

    Eigen::VectorXd phase2_cost = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + m));
    for (std::size_t j = 0; j < n; ++j) {
        phase2_cost(static_cast<Eigen::Index>(j)) = prob.cost[j];
    }
    st = run_phase(t, phase2_cost, max_iter, tol, res.iterations);
    res.status = st;
    if (st != SimplexStatus::optimal) return res;

    res.v.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) res.v[j] = t.v(static_cast<Eigen::Index>(j));
    res.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) res.objective += prob.cost[j] * res.v[j];
    res.y.assign(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        res.y[r] = row_sign[r] * t.y(static_cast<Eigen::Index>(r));
    }
    res.basis = t.basis;
    return res;
}

}  // namespace lpsum
