#include "lpsum/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lpsum {

std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finalizer.
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_key(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                       std::uint64_t d) {
    std::uint64_t h = mix64(a);
    h = mix64(h ^ (b + 0x9e3779b97f4a7c15ULL));
    h = mix64(h ^ (c + 0xc2b2ae3d27d4eb4fULL));
    h = mix64(h ^ (d + 0x165667b19e3779f9ULL));
    return h;
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : key_(hash_key(seed, stream)), counter_(0) {}

std::uint64_t Rng::next_u64() { return mix64(key_ ^ mix64(++counter_)); }

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_sym() { return 2.0 * uniform() - 1.0 + 0x1.0p-53; }

double Rng::normal() {
    // Box-Muller; one value per call keeps draws a pure function of the counter.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::exponential() {
    double u = uniform();
    while (u <= 0.0) u = uniform();
    return -std::log(u);
}

double Rng::cauchy() {
    // Ratio of uniforms on the unit disk.
    while (true) {
        const double u = uniform_sym();
        const double v = uniform_sym();
        if (u * u + v * v <= 1.0 && u != 0.0) return v / u;
    }
}

double Rng::gamma(double shape) {
    if (shape <= 0.0) throw std::invalid_argument("gamma: shape must be positive");
    if (shape < 1.0) {
        // Boost: G(a) = G(a+1) * U^{1/a}.
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

std::size_t Rng::below(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    return static_cast<std::size_t>(next_u64() % n);
}

double keyed_cauchy(std::uint64_t seed, std::uint64_t row, std::uint64_t col) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        const std::uint64_t h1 = hash_key(seed, row, col, 2 * attempt);
        const std::uint64_t h2 = hash_key(seed, row, col, 2 * attempt + 1);
        const double u = 2.0 * (static_cast<double>(h1 >> 11) * 0x1.0p-53) - 1.0;
        const double v = 2.0 * (static_cast<double>(h2 >> 11) * 0x1.0p-53) - 1.0;
        if (u * u + v * v <= 1.0 && u != 0.0) return v / u;
    }
}

std::size_t keyed_index(std::uint64_t seed, std::uint64_t row, std::uint64_t col,
                        std::size_t n) {
    if (n == 0) throw std::invalid_argument("keyed_index: empty range");
    return static_cast<std::size_t>(hash_key(seed, row, col) % n);
}

std::vector<double> sample_unit_q_sphere(Rng& rng, std::size_t d, PNorm q) {
    std::vector<double> z(d);
    if (q.is_inf()) {
        for (auto& x : z) x = rng.uniform_sym();
    } else {
        const double qe = q.value();
        for (auto& x : z) {
            // |x| ~ Gamma(1/q)^{1/q} has density proportional to exp(-|x|^q).
            const double mag = std::pow(rng.gamma(1.0 / qe), 1.0 / qe);
            x = (rng.uniform() < 0.5 ? -mag : mag);
        }
    }
    double nrm = vector_pnorm(z, q);
    if (nrm == 0.0) {
        z.assign(d, 0.0);
        z[0] = 1.0;
        return z;
    }
    for (auto& x : z) x /= nrm;
    return z;
}

}  // namespace lpsum
