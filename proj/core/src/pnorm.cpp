#include "lpsum/pnorm.hpp"

#include <cmath>
#include <stdexcept>

namespace lpsum {

PNorm PNorm::of(double p) {
    if (!std::isfinite(p) || p < 1.0) {
        throw std::invalid_argument("PNorm: exponent must be finite and >= 1");
    }
    return PNorm(p, false);
}

double PNorm::value() const {
    if (inf_) throw std::logic_error("PNorm::value on the infinity norm");
    return p_;
}

PNorm PNorm::dual() const {
    if (inf_) return PNorm::of(1.0);
    if (p_ == 1.0) return PNorm::inf();
    return PNorm(p_ / (p_ - 1.0), false);
}

double vector_pnorm(std::span<const double> v, PNorm p) {
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    if (p.is_inf() || scale == 0.0) return scale;
    const double pe = p.value();
    double acc = 0.0;
    for (double x : v) {
        const double t = std::abs(x) / scale;
        acc += std::pow(t, pe);
    }
    return scale * std::pow(acc, 1.0 / pe);
}

double entrywise_pnorm(const MatrixF& m, PNorm p) {
    return vector_pnorm(std::span<const double>(m.data(), m.size()), p);
}

double vector_pnorm_pow(std::span<const double> v, double p) {
    double acc = 0.0;
    for (double x : v) acc += std::pow(std::abs(x), p);
    return acc;
}

}  // namespace lpsum
