#pragma once

#include <cstdint>
#include <vector>

#include "lpsum/pnorm.hpp"

namespace lpsum {

/// Counter-based pseudo-random generator (splitmix64 over a keyed counter).
/// Draws depend only on (seed, stream, draw index), so randomized components
/// are reproducible regardless of call interleaving or platform; the standard
/// library distributions are implementation-defined and are avoided here.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next_u64();
    double uniform();      // [0, 1)
    double uniform_sym();  // (-1, 1)
    double normal();       // Box-Muller
    double exponential();  // rate 1
    double cauchy();       // standard Cauchy via ratio of uniforms
    /// Gamma(shape, 1), shape > 0 (Marsaglia-Tsang; shape<1 via the boost trick).
    double gamma(double shape);
    std::size_t below(std::size_t n);  // uniform in [0, n)

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_key(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0,
                       std::uint64_t d = 0);

/// Standard Cauchy variate fully determined by (seed, row, col): ratio of
/// uniforms on the unit disk, rejection driven by an inner counter.
double keyed_cauchy(std::uint64_t seed, std::uint64_t row, std::uint64_t col);

/// Uniform index in [0, n) determined by (seed, row, col).
std::size_t keyed_index(std::uint64_t seed, std::uint64_t row, std::uint64_t col,
                        std::size_t n);

/// Uniform direction on the unit q-sphere: normalized i.i.d. draws with
/// density proportional to exp(-|x|^q); q = inf uses uniform [-1,1] draws.
std::vector<double> sample_unit_q_sphere(Rng& rng, std::size_t d, PNorm q);

}  // namespace lpsum
