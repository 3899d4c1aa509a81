#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpsum/matrix.hpp"

namespace lpsum {

enum class DatasetKind { gaussian, heavytail, augmented_identity, census_like };

DatasetKind dataset_kind_from_name(const std::string& name);
std::string dataset_kind_name(DatasetKind kind);

struct GenParams {
    std::size_t n = 1000;
    std::size_t d = 8;
    std::size_t k = 3;     // planted identity directions (augmented-identity)
    double noise = 1.0;
    double scale = 10.0;   // magnitude of the dense part relative to planted rows
};

struct Dataset {
    MatrixF a;
    std::vector<double> b;
    std::vector<std::size_t> planted_rows;  // row positions after permutation
    std::string name;
};

/// Reproducible synthetic generators. augmented-identity appends k unit rows
/// in otherwise-unrepresented directions and permutes the rows; census-like
/// produces integer-quantized skewed sparse columns with heavy row
/// duplication.
Dataset gen_dataset(DatasetKind kind, const GenParams& params, std::uint64_t seed);

/// [A | b] as a single matrix of width d+1.
MatrixF joint_matrix(const Dataset& ds);

}  // namespace lpsum
