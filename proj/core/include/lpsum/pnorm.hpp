#pragma once

#include <span>

#include "lpsum/matrix.hpp"

namespace lpsum {

/// Norm exponent p in [1, inf], with infinity as a distinguished value rather
/// than a large float. Carried as a value so one code path serves every norm.
class PNorm {
public:
    /// Finite exponent, p >= 1.
    static PNorm of(double p);
    static PNorm inf() { return PNorm(0.0, true); }

    bool is_inf() const noexcept { return inf_; }
    double value() const;  // throws if infinite

    /// Dual exponent q with 1/p + 1/q = 1; (1, inf) and (inf, 1) at the ends.
    PNorm dual() const;

    bool operator==(const PNorm& o) const noexcept {
        return inf_ == o.inf_ && (inf_ || p_ == o.p_);
    }

private:
    PNorm(double p, bool inf) : p_(p), inf_(inf) {}
    double p_;
    bool inf_;
};

/// (sum_i |v_i|^p)^(1/p); max |v_i| for p = inf. Scales by the largest
/// magnitude internally so large exponents do not overflow.
double vector_pnorm(std::span<const double> v, PNorm p);

/// Entrywise p-norm of a matrix: (sum_{ij} |a_ij|^p)^(1/p), max entry for inf.
double entrywise_pnorm(const MatrixF& m, PNorm p);

/// sum_i |v_i|^p without the final root (p finite). Used by score kernels
/// where the p-th power is the quantity of interest.
double vector_pnorm_pow(std::span<const double> v, double p);

}  // namespace lpsum
