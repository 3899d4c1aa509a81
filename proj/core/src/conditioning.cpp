#include "lpsum/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eigen_util.hpp"
#include "lpsum/rng.hpp"

namespace lpsum {

std::string wcb_method_name(WcbMethod m) {
    switch (m) {
        case WcbMethod::orth: return "orth";
        case WcbMethod::spc3: return "spc3";
        case WcbMethod::rounding: return "rounding";
    }
    return "?";
}

WcbMethod wcb_method_from_name(const std::string& name) {
    if (name == "orth") return WcbMethod::orth;
    if (name == "spc3") return WcbMethod::spc3;
    if (name == "rounding") return WcbMethod::rounding;
    throw std::invalid_argument("unknown wcb method '" + name + "'");
}

RankDeficientError::RankDeficientError(std::size_t detected, std::size_t wanted)
    : std::runtime_error("rank-deficient matrix: numerical rank " +
                         std::to_string(detected) + " < " + std::to_string(wanted)),
      detected_(detected) {}

RoundingConvergenceError::RoundingConvergenceError(const std::string& what,
                                                   WcbCertificate last)
    : std::runtime_error(what), last_(last) {}

namespace detail {

std::size_t numerical_rank(const MatrixF& a, double rel_tol) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double cutoff = rel_tol * sv(0);
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++r;
    }
    return r;
}

double beta_rigorous(const MatrixF& u, PNorm p) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(u));
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    const double n = static_cast<double>(u.rows());
    const double d = static_cast<double>(u.cols());
    const PNorm q = p.dual();
    const double inv_q = q.is_inf() ? 0.0 : 1.0 / q.value();
    const double inv_p = p.is_inf() ? 0.0 : 1.0 / p.value();
    const double zq_vs_z2 = std::pow(d, std::max(0.0, inv_q - 0.5));
    const double u2_vs_up = std::pow(n, std::max(0.0, 0.5 - inv_p));
    return zq_vs_z2 * u2_vs_up / smin;
}

// Worst sampled ratio ||z||_q / ||Uz||_p, with the 2d coordinate directions
// always included and the best starts refined by random-perturbation ascent.
double sampled_beta(const MatrixF& u, PNorm p, std::uint64_t seed,
                    std::size_t n_samples) {
    const std::size_t d = u.cols();
    const PNorm q = p.dual();
    Rng rng(seed, 0x62657461ULL);
    auto ratio = [&](const std::vector<double>& z) {
        const double num = vector_pnorm(z, q);
        const double den = vector_pnorm(matvec(u, z), p);
        return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
    };
    double worst = 0.0;
    std::vector<double> worst_z(d, 0.0);
    std::vector<double> z(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        std::fill(z.begin(), z.end(), 0.0);
        for (double s : {1.0, -1.0}) {
            z[j] = s;
            const double r = ratio(z);
            if (r > worst) { worst = r; worst_z = z; }
        }
    }
    for (std::size_t k = 0; k < n_samples; ++k) {
        z = sample_unit_q_sphere(rng, d, q);
        const double r = ratio(z);
        if (r > worst) { worst = r; worst_z = z; }
    }
    // Local ascent around the worst start.
    double step = 0.25;
    std::vector<double> cand(d);
    for (std::size_t it = 0; it < 200; ++it) {
        bool improved = false;
        for (std::size_t trial = 0; trial < 8; ++trial) {
            for (std::size_t j = 0; j < d; ++j) {
                cand[j] = worst_z[j] + step * rng.normal();
            }
            const double r = ratio(cand);
            if (r > worst) {
                worst = r;
                worst_z = cand;
                improved = true;
            }
        }
        if (!improved) {
            step *= 0.5;
            if (step < 1e-8) break;
        }
    }
    return worst;
}

WcbCertificate certify_basis(const MatrixF& u, PNorm p, WcbMethod method,
                             std::uint64_t seed, std::size_t n_samples) {
    WcbCertificate cert;
    cert.p = p;
    cert.method = method;
    cert.alpha = entrywise_pnorm(u, p) * (1.0 + 1e-12);
    if (method == WcbMethod::orth && !p.is_inf() && p.value() == 2.0) {
        cert.beta = 1.0;
        return cert;
    }
    const double emp = sampled_beta(u, p, seed, n_samples);
    cert.beta = std::min(2.0 * emp, beta_rigorous(u, p));
    return cert;
}

LewisResult lewis_weights_any(const MatrixF& a, double p, std::size_t iters,
                              double tol) {
    if (p <= 0.0 || !std::isfinite(p)) {
        throw std::invalid_argument("weight iteration needs a positive finite exponent");
    }
    const std::size_t n = a.rows(), d = a.cols();
    const Eigen::MatrixXd ae = detail::to_eigen(a);
    LewisResult out;
    out.weights.assign(n, 1.0);
    std::vector<bool> zero_row(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (ae.row(static_cast<Eigen::Index>(i)).norm() == 0.0) {
            zero_row[i] = true;
            out.weights[i] = 0.0;
        }
    }
    const double expo = 1.0 - 2.0 / p;
    const double damp = p <= 2.0 ? 1.0 : 2.0 / p;
    std::vector<double> target(n, 0.0);

    auto compute_target = [&](const std::vector<double>& w) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
        for (std::size_t i = 0; i < n; ++i) {
            if (zero_row[i]) continue;
            const double s = std::pow(w[i], expo);
            m.noalias() += s * ae.row(static_cast<Eigen::Index>(i)).transpose() *
                           ae.row(static_cast<Eigen::Index>(i));
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
            ldlt.vectorD().minCoeff() <= 1e-13 * m.trace()) {
            m += (1e-12 * m.trace() / static_cast<double>(d)) *
                 Eigen::MatrixXd::Identity(d, d);
            ldlt.compute(m);
            out.regularized = true;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (zero_row[i]) {
                target[i] = 0.0;
                continue;
            }
            const Eigen::VectorXd ai = ae.row(static_cast<Eigen::Index>(i)).transpose();
            const double quad = ai.dot(ldlt.solve(ai));
            target[i] = std::pow(std::max(quad, 0.0), p / 2.0);
        }
    };

    out.converged = false;
    for (std::size_t it = 0; it < iters; ++it) {
        compute_target(out.weights);
        double max_rel = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (zero_row[i]) continue;
            const double next =
                damp == 1.0 ? target[i]
                            : std::pow(out.weights[i], 1.0 - damp) * std::pow(target[i], damp);
            max_rel = std::max(max_rel, std::abs(next - out.weights[i]) /
                                            std::max(out.weights[i], 1e-300));
            out.weights[i] = next;
        }
        out.iterations = it + 1;
        if (max_rel < tol) {
            out.converged = true;
            break;
        }
    }
    compute_target(out.weights);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (zero_row[i]) continue;
        res = std::max(res, std::abs(out.weights[i] - target[i]) /
                                std::max(out.weights[i], 1e-300));
    }
    out.residual = res;
    return out;
}

}  // namespace detail

namespace {

// Thin QR with the triangular factor's diagonal forced nonnegative, so the
// factorization is unique and identity inputs map to identity factors.
void thin_qr(const Eigen::MatrixXd& a, Eigen::MatrixXd& q, Eigen::MatrixXd& r) {
    const Eigen::Index d = a.cols();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), d);
    r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < d; ++j) {
        if (r(j, j) < 0.0) {
            r.row(j) = -r.row(j);
            q.col(j) = -q.col(j);
        }
    }
}

void require_full_rank(const MatrixF& a) {
    if (a.rows() < a.cols() || a.cols() == 0) {
        throw RankDeficientError(detail::numerical_rank(a), a.cols());
    }
    const std::size_t r = detail::numerical_rank(a);
    if (r < a.cols()) throw RankDeficientError(r, a.cols());
}

}  // namespace

WcbFactorization wcb_orth(const MatrixF& a) {
    require_full_rank(a);
    Eigen::MatrixXd q, r;
    thin_qr(detail::to_eigen(a), q, r);
    WcbFactorization f;
    f.U = detail::from_eigen(q);
    f.S = detail::from_eigen(r);
    f.R = detail::from_eigen(
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(r.rows(), r.cols())));
    f.cert = WcbCertificate{std::sqrt(static_cast<double>(a.cols())), 1.0, PNorm::of(2.0),
                            WcbMethod::orth};
    return f;
}

WcbFactorization wcb_rounding(const MatrixF& a, PNorm p, double tol) {
    if (p.is_inf()) throw std::invalid_argument("wcb_rounding: p must be finite");
    if (p.value() == 2.0) {
        throw std::invalid_argument("wcb_rounding: use wcb_orth for p = 2");
    }
    require_full_rank(a);
    const std::size_t d = a.cols();

    Eigen::MatrixXd q, r0;
    thin_qr(detail::to_eigen(a), q, r0);

    // Coordinate-ascent ellipsoid on the rows of the QR factor.
    const std::size_t cap = 500 * d;
    MatrixF qm = detail::from_eigen(q);
    LewisResult lw = detail::lewis_weights_any(qm, p.value(), cap, tol);

    const double expo = 1.0 - 2.0 / p.value();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t i = 0; i < qm.rows(); ++i) {
        const double s = std::pow(std::max(lw.weights[i], 1e-300), expo);
        m.noalias() += s * q.row(static_cast<Eigen::Index>(i)).transpose() *
                       q.row(static_cast<Eigen::Index>(i));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
        throw std::runtime_error("wcb_rounding: ellipsoid matrix not positive definite");
    }
    const Eigen::MatrixXd t = es.operatorInverseSqrt();

    Eigen::MatrixXd u = q * t;
    MatrixF um = detail::from_eigen(u);

    // Pin the sampled dual-direction ratio at one; the certificate then holds
    // with a clean factor-2 margin for unseen directions.
    const std::uint64_t norm_seed = hash_key(0x726e64ULL, a.rows(), a.cols());
    const double emp = detail::sampled_beta(um, p, norm_seed, 512);
    if (!(emp > 0.0) || !std::isfinite(emp)) {
        throw std::runtime_error("wcb_rounding: degenerate dual-direction ratio");
    }
    u *= emp;
    um = detail::from_eigen(u);

    WcbFactorization f;
    f.U = um;
    Eigen::MatrixXd r_full =
        r0.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(d, d)) * t * emp;
    f.R = detail::from_eigen(r_full);
    f.S = detail::from_eigen(Eigen::MatrixXd(r_full.inverse()));
    f.cert = detail::certify_basis(um, p, WcbMethod::rounding, norm_seed, 512);
    // The normalization makes the sampled ratio exactly one on this seed, so
    // the recorded beta is the safety factor itself (or the rigorous cap).
    f.converged = lw.converged;
    if (!lw.converged) {
        throw RoundingConvergenceError(
            "wcb_rounding: weight iteration did not reach tolerance within " +
                std::to_string(cap) + " iterations",
            f.cert);
    }
    return f;
}

WcbFactorization wcb_spc3(const MatrixF& a, std::uint64_t seed) {
    require_full_rank(a);
    const std::size_t n = a.rows(), d = a.cols();
    const std::size_t r = static_cast<std::size_t>(
        std::ceil(8.0 * static_cast<double>(d) * std::log2(static_cast<double>(d) + 1.0)));
    const double alpha_nominal = std::pow(static_cast<double>(d), 2.5);
    const PNorm p1 = PNorm::of(1.0);

    bool have_any = false;
    WcbFactorization best;
    double best_product = std::numeric_limits<double>::infinity();
    // Up to 3 resamples cover rank-deficient sketches; the remaining attempts
    // only fire when a full-rank sketch fails its own certificate estimate.
    for (std::uint64_t attempt = 0; attempt < 8; ++attempt) {
        const std::uint64_t s = seed + attempt;
        MatrixF sketch(r, d);
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t target = keyed_index(s, j, 0, r);
            const double c = keyed_cauchy(s, j, 1);
            auto src = a.row(j);
            auto dst = sketch.row(target);
            for (std::size_t k = 0; k < d; ++k) dst[k] += c * src[k];
        }
        if (detail::numerical_rank(sketch) < d) continue;
        Eigen::MatrixXd q, rt;
        thin_qr(detail::to_eigen(sketch), q, rt);
        Eigen::MatrixXd rinv =
            rt.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(d, d));
        MatrixF u_raw = detail::from_eigen(detail::to_eigen(a) * rinv);

        // The raw Cauchy sketch carries an arbitrary heavy-tailed scale, so
        // calibrate the basis: place it at the geometric middle of the window
        // where both certificate conditions hold.
        const double alpha_raw = entrywise_pnorm(u_raw, p1);
        const double beta_raw = [&] {
            Rng rng(hash_key(s, 0x73656c66ULL), 0);
            double worst = 0.0;
            std::vector<double> z(d, 0.0);
            auto consider = [&](const std::vector<double>& dir) {
                const double den = vector_pnorm(matvec(u_raw, dir), p1);
                if (den > 0.0) worst = std::max(worst, vector_pnorm(dir, PNorm::inf()) / den);
            };
            for (std::size_t j = 0; j < d; ++j) {
                std::fill(z.begin(), z.end(), 0.0);
                for (double sign : {1.0, -1.0}) {
                    z[j] = sign;
                    consider(z);
                }
            }
            // Columns of the sketch's triangular factor map back to the data
            // coordinate directions, where violations concentrate (a single
            // oversized Cauchy coefficient deflates exactly one of them).
            for (std::size_t j = 0; j < d; ++j) {
                for (std::size_t i = 0; i < d; ++i) {
                    z[i] = rt(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
                }
                consider(z);
            }
            for (int k = 0; k < 192; ++k) consider(sample_unit_q_sphere(rng, d, PNorm::inf()));
            return worst;
        }();
        if (!(alpha_raw > 0.0) || !(beta_raw > 0.0)) continue;
        const double scale = std::sqrt(beta_raw * alpha_nominal / alpha_raw);

        WcbFactorization f;
        Eigen::MatrixXd r_scaled = rinv * scale;
        f.R = detail::from_eigen(r_scaled);
        f.S = detail::from_eigen(Eigen::MatrixXd(rt / scale));
        f.U = detail::from_eigen(detail::to_eigen(u_raw) * scale);
        f.cert = WcbCertificate{alpha_nominal, 1.0, p1, WcbMethod::spc3};
        const double product = alpha_raw * beta_raw;
        // Accept only rounding-grade conditioning; a single oversized Cauchy
        // draw inflates the product far beyond this.
        if (product <= 2.0 * std::pow(static_cast<double>(d), 1.5)) return f;
        have_any = true;
        if (product < best_product) {
            best_product = product;
            best = f;
        }
    }
    if (have_any) return best;  // all attempts marginal: hand back the best one
    throw RankDeficientError(0, d);
}

WcbFactorization make_wcb(const MatrixF& a, PNorm p, WcbMethod method,
                          std::uint64_t seed) {
    switch (method) {
        case WcbMethod::orth: {
            WcbFactorization f = wcb_orth(a);
            if (p.is_inf() || p.value() != 2.0) {
                // An orthonormal basis used at a foreign exponent: certify at
                // the exponent actually requested.
                f.cert = detail::certify_basis(f.U, p, WcbMethod::orth,
                                               hash_key(seed, 0x6f727468ULL), 512);
            }
            return f;
        }
        case WcbMethod::spc3: {
            if (p.is_inf() || p.value() != 1.0) {
                throw std::invalid_argument("spc3 constructs ell_1 bases only");
            }
            return wcb_spc3(a, seed);
        }
        case WcbMethod::rounding: {
            if (!p.is_inf() && p.value() == 2.0) return wcb_orth(a);
            return wcb_rounding(a, p);
        }
    }
    throw std::logic_error("unreachable wcb method");
}

WcbCheckResult wcb_check(const WcbFactorization& f, std::size_t n_samples,
                         std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("wcb_check: n_samples >= 1");
    const PNorm p = f.cert.p;
    const PNorm q = p.dual();
    const std::size_t d = f.U.cols();
    WcbCheckResult res;
    res.worst_alpha_ratio = entrywise_pnorm(f.U, p) / f.cert.alpha;

    Rng rng(seed, 0x636865636bULL);
    double worst = 0.0;
    std::vector<double> z(d, 0.0);
    auto consider = [&](const std::vector<double>& dir) {
        const double den = vector_pnorm(matvec(f.U, dir), p);
        const double num = vector_pnorm(dir, q);
        const double ratio =
            den > 0.0 ? num / (f.cert.beta * den) : std::numeric_limits<double>::infinity();
        worst = std::max(worst, ratio);
    };
    for (std::size_t j = 0; j < d; ++j) {
        std::fill(z.begin(), z.end(), 0.0);
        for (double s : {1.0, -1.0}) {
            z[j] = s;
            consider(z);
        }
    }
    for (std::size_t k = 0; k < n_samples; ++k) {
        consider(sample_unit_q_sphere(rng, d, q));
    }
    res.worst_beta_ratio = worst;
    // 1e-9 slack: exact certificates (orthonormal, beta = 1) sit on the
    // boundary up to floating-point rounding.
    res.pass =
        res.worst_alpha_ratio <= 1.0 + 1e-9 && res.worst_beta_ratio <= 1.0 + 1e-9;
    return res;
}

LewisResult lewis_weights(const MatrixF& a, PNorm p, std::size_t iters, double tol) {
    if (p.is_inf() || (p.value() != 1.0 && p.value() != 2.0)) {
        throw std::invalid_argument("lewis_weights: p must be 1 or 2");
    }
    require_full_rank(a);
    return detail::lewis_weights_any(a, p.value(), iters, tol);
}

}  // namespace lpsum
