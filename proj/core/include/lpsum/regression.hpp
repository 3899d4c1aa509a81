#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpsum/embedding.hpp"
#include "lpsum/leverage.hpp"
#include "lpsum/matrix.hpp"
#include "lpsum/pnorm.hpp"
#include "lpsum/stream.hpp"

namespace lpsum {

struct RegressionInstance {
    MatrixF a;              // n x d design
    std::vector<double> b;  // n targets
    PNorm p = PNorm::of(2.0);

    void validate() const;
};

struct RegressionSolution {
    std::vector<double> x;
    double objective = 0.0;  // recomputed ||Ax - b||_p at the returned x
    std::string method;
    std::size_t iterations = 0;
    std::optional<double> certified_gap;  // relative-error factor, when known
    bool converged = true;
};

/// ||A x - b||_p of a candidate point.
double residual_norm(const RegressionInstance& inst, std::span<const double> x);

/// Finite-p regression. p = 2 by QR; p = 1 by linear programming (dense
/// simplex on the d-row dual with Bland's guard); other p by iteratively
/// reweighted least squares with residual smoothing and a monotone line
/// search.
RegressionSolution solve_lp_regression(const RegressionInstance& inst,
                                       double tol = 1e-10,
                                       std::size_t max_iter = 200);

/// Chebyshev regression min ||Ax - b||_inf as a linear program, solved by the
/// same dense simplex; the multipliers of the d+1 dual rows are the solution.
RegressionSolution solve_linf_exact(const RegressionInstance& inst);

/// Sketch-and-solve: embed Z = [A, b], split the summary, solve the reduced
/// instance. certified_gap carries the certified distortion product, which
/// bounds the objective ratio against the exact optimum.
RegressionSolution regress_via_embedding(const RegressionInstance& inst,
                                         TreeConfig cfg);

struct LinfStreamResult {
    RegressionSolution solution;  // objective is on the retained rows
    SummaryState summary;         // retained [A | b] rows with provenance
    double b_norm_estimate = 0.0; // running ||b||_p at stream end
    std::size_t kept_by_leverage = 0;
    std::size_t kept_by_b = 0;
};

/// Single pass over [A | b] rows: keeps rows of high local leverage in the
/// design columns at the eps-derived threshold, plus rows whose target entry
/// exceeds eps times the running ||b||_p, then solves the reduced Chebyshev
/// problem. Additive error eps ||b||_p against the full-data optimum.
LinfStreamResult linf_additive_stream(RowBlockStream& stream, PNorm p, double eps,
                                      WcbMethod method, std::uint64_t seed = 0);

}  // namespace lpsum
