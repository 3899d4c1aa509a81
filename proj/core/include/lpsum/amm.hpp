#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lpsum/matrix.hpp"
#include "lpsum/stream.hpp"

namespace lpsum {

/// Sparse remnant of a vector after magnitude thresholding: entries with
/// |value| strictly above (eps/2) * norm1_reference, at most 2/eps of them
/// when the reference dominates the vector's ell_1 norm.
struct ThresholdedVector {
    std::vector<std::pair<std::size_t, double>> kept;  // sorted by index
    double eps = 0.0;
    double norm1_reference = 0.0;
};

ThresholdedVector threshold_vector(std::span<const double> x, double eps,
                                   double ref_norm);

/// Inner product of the two thresholded vectors, each pruned against its own
/// ell_1 norm. Two-sided error eps ||x||_1 ||y||_1 for any signs; for
/// entrywise-nonnegative inputs the result also never exceeds <x, y>.
double sketch_inner_product(std::span<const double> x, std::span<const double> y,
                            double eps);

/// Thresholded factor pair with the guaranteed entrywise-ell_1 product error.
struct AmmSketch {
    std::vector<ThresholdedVector> a;  // per row (rowwise) or per column (columnwise)
    std::vector<ThresholdedVector> b;
    std::size_t a_rows = 0, a_cols = 0, b_rows = 0, b_cols = 0;
    double eps = 0.0;
    double error_bound = 0.0;  // eps ||A||_1 ||B||_1
    bool columnwise = false;
};

/// Threshold every row of A and B against its own ell_1 norm;
/// ||A B^T - Abar Bbar^T||_1 <= eps ||A||_1 ||B||_1.
AmmSketch amm_rowwise(const MatrixF& a, const MatrixF& b, double eps);

/// Single pass over synchronized row streams, keeping entries that beat the
/// running column-norm threshold and re-pruning against the final norms, so
/// the kept set equals the offline per-column rule exactly;
/// ||A^T B - Abar^T Bbar||_1 <= eps ||A||_1 ||B||_1.
AmmSketch amm_streaming_columns(RowBlockStream& stream_a, RowBlockStream& stream_b,
                                double eps);

/// Dense reconstruction of a thresholded factor (tests and reports).
MatrixF densify(const std::vector<ThresholdedVector>& vecs, std::size_t dim,
                bool vectors_are_columns);

/// CSV triples "i,j,value" of the kept entries.
std::string sparse_triples_csv(const AmmSketch& sketch);

}  // namespace lpsum
