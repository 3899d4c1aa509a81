#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <vector>

#include "lpsum/matrix.hpp"
#include "lpsum/pnorm.hpp"

namespace lpsum::oracles {

inline Eigen::MatrixXd to_e(const MatrixF& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

inline double linf_objective(const MatrixF& a, const std::vector<double>& b,
                             const Eigen::VectorXd& x) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double r = -b[i];
        for (std::size_t j = 0; j < a.cols(); ++j) r += a(i, j) * x(static_cast<Eigen::Index>(j));
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

/// Brute-force Chebyshev regression: some optimum solves an all-tight system
/// over d+1 rows with a sign pattern (or interpolates d rows exactly), so
/// enumerate every candidate vertex and take the best full objective.
inline double linf_vertex_enumeration(const MatrixF& a, const std::vector<double>& b) {
    const std::size_t n = a.rows(), d = a.cols();
    Eigen::MatrixXd ae = to_e(a);
    double best = std::numeric_limits<double>::infinity();
    {  // x = 0 is always feasible
        Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
        best = std::min(best, linf_objective(a, b, zero));
    }

    std::vector<std::size_t> idx(d + 1);
    // Enumerate (d+1)-subsets.
    std::vector<std::size_t> c(d + 1);
    for (std::size_t j = 0; j <= d; ++j) c[j] = j;
    if (n >= d + 1) {
        while (true) {
            for (std::size_t signs = 0; signs < (1u << d); ++signs) {
                // Fix the first row's sign to +1; others vary.
                Eigen::MatrixXd m(d + 1, d + 1);
                Eigen::VectorXd rhs(d + 1);
                for (std::size_t r = 0; r <= d; ++r) {
                    for (std::size_t jj = 0; jj < d; ++jj) m(r, jj) = ae(c[r], jj);
                    const double sigma =
                        (r == 0) ? 1.0 : ((signs >> (r - 1)) & 1u ? -1.0 : 1.0);
                    m(r, static_cast<Eigen::Index>(d)) = sigma;
                    rhs(static_cast<Eigen::Index>(r)) = b[c[r]];
                }
                Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
                if (!lu.isInvertible()) continue;
                Eigen::VectorXd sol = lu.solve(rhs);
                best = std::min(best, linf_objective(a, b, sol.head(static_cast<Eigen::Index>(d))));
            }
            // next combination
            std::size_t k = d + 1;
            while (k > 0 && c[k - 1] == n - (d + 1) + (k - 1)) --k;
            if (k == 0) break;
            ++c[k - 1];
            for (std::size_t jj = k; jj <= d; ++jj) c[jj] = c[jj - 1] + 1;
        }
    }

    // d-subsets interpolated exactly (zero-residual vertices).
    if (n >= d) {
        std::vector<std::size_t> cd(d);
        for (std::size_t j = 0; j < d; ++j) cd[j] = j;
        while (true) {
            Eigen::MatrixXd m(d, d);
            Eigen::VectorXd rhs(d);
            for (std::size_t r = 0; r < d; ++r) {
                for (std::size_t jj = 0; jj < d; ++jj) m(r, jj) = ae(cd[r], jj);
                rhs(static_cast<Eigen::Index>(r)) = b[cd[r]];
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
            if (lu.isInvertible()) {
                Eigen::VectorXd sol = lu.solve(rhs);
                best = std::min(best, linf_objective(a, b, sol));
            }
            std::size_t k = d;
            while (k > 0 && cd[k - 1] == n - d + (k - 1)) --k;
            if (k == 0) break;
            ++cd[k - 1];
            for (std::size_t jj = k; jj < d; ++jj) cd[jj] = cd[jj - 1] + 1;
        }
    }
    return best;
}

/// 1-d ell_1 regression oracle: the optimum sits at a breakpoint b_i / a_i.
inline double l1_breakpoints_1d(const std::vector<double>& a,
                                const std::vector<double>& b) {
    double best = std::numeric_limits<double>::infinity();
    auto value = [&](double x) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] * x - b[i]);
        return acc;
    };
    best = std::min(best, value(0.0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != 0.0) best = std::min(best, value(b[i] / a[i]));
    }
    return best;
}

/// Minimum-norm least squares via SVD.
inline std::vector<double> pinv_solve(const MatrixF& a, const std::vector<double>& b) {
    Eigen::MatrixXd ae = to_e(a);
    Eigen::VectorXd be = Eigen::Map<const Eigen::VectorXd>(b.data(),
                                                           static_cast<Eigen::Index>(b.size()));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ae, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd x = svd.solve(be);
    return std::vector<double>(x.data(), x.data() + x.size());
}

}  // namespace lpsum::oracles
