#pragma once

#include <cstdint>

#include "lpsum/matrix.hpp"
#include "lpsum/rng.hpp"

namespace lpsum::testdata {

inline MatrixF gaussian(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed, 0x74657374ULL);
    MatrixF m(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = rng.normal();
    return m;
}

inline MatrixF cauchy_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
    Rng rng(seed, 0x63617563ULL);
    MatrixF m(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = rng.cauchy();
    return m;
}

inline std::vector<double> gaussian_vec(std::size_t n, std::uint64_t seed) {
    Rng rng(seed, 0x76656374ULL);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

}  // namespace lpsum::testdata
