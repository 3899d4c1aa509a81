#pragma once

#include <cstddef>
#include <vector>

#include "lpsum/matrix.hpp"

namespace lpsum {

/// Equality-form linear program with box-bounded variables:
/// minimize cost.v subject to e v = g, 0 <= v_j <= upper_j (inf allowed).
struct SimplexProblem {
    MatrixF e;
    std::vector<double> g;
    std::vector<double> cost;
    std::vector<double> upper;
};

enum class SimplexStatus { optimal, infeasible, iteration_limit };

struct SimplexResult {
    SimplexStatus status = SimplexStatus::iteration_limit;
    std::vector<double> v;      // primal variable values
    double objective = 0.0;
    std::vector<double> y;      // equality-row multipliers at optimality
    std::vector<std::size_t> basis;
    std::size_t iterations = 0;
};

/// Dense two-phase primal simplex with bounded variables. Dantzig pricing
/// with a Bland fallback that engages after a degenerate streak, so cycling
/// cannot occur.
SimplexResult solve_simplex(const SimplexProblem& prob, std::size_t max_iter = 50000,
                            double tol = 1e-9);

}  // namespace lpsum
