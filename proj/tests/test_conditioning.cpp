#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "lpsum/conditioning.hpp"
#include "lpsum/pnorm.hpp"
#include "support/testdata.hpp"

using namespace lpsum;

namespace {

Eigen::MatrixXd to_e(const MatrixF& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

// Independent oracle: closed-form ell_2 leverage scores diag(A (A^T A)^{-1} A^T).
std::vector<double> l2_leverage_oracle(const MatrixF& a) {
    Eigen::MatrixXd ae = to_e(a);
    Eigen::MatrixXd gram_inv = (ae.transpose() * ae).inverse();
    std::vector<double> lev(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Eigen::VectorXd r = ae.row(i).transpose();
        lev[i] = r.dot(gram_inv * r);
    }
    return lev;
}

void check_factorization_consistency(const MatrixF& a, const WcbFactorization& f) {
    // A R = U and U S = A within 1e-8 relative Frobenius error.
    Eigen::MatrixXd ae = to_e(a), ue = to_e(f.U), re = to_e(f.R), se = to_e(f.S);
    CHECK((ae * re - ue).norm() <= 1e-8 * ue.norm() + 1e-12);
    CHECK((ue * se - ae).norm() <= 1e-8 * ae.norm() + 1e-12);
    CHECK((re * se - Eigen::MatrixXd::Identity(re.rows(), re.cols())).norm() <= 1e-8);
}

}  // namespace

TEST_CASE("wcb_orth on identity") {
    MatrixF a = MatrixF::identity(3);
    auto f = wcb_orth(a);
    CHECK(max_abs_diff(f.U, a) <= 1e-14);
    CHECK(max_abs_diff(f.R, a) <= 1e-14);
    CHECK(f.cert.alpha == doctest::Approx(std::sqrt(3.0)));
    CHECK(f.cert.beta == 1.0);
    CHECK(f.cert.p.value() == 2.0);
}

TEST_CASE("wcb_orth on diagonal rescales columns") {
    MatrixF a({{2.0, 0.0}, {0.0, 5.0}});
    auto f = wcb_orth(a);
    CHECK(std::abs(std::abs(f.U(0, 0)) - 1.0) <= 1e-14);
    CHECK(std::abs(std::abs(f.U(1, 1)) - 1.0) <= 1e-14);
    CHECK(std::abs(std::abs(f.R(0, 0)) - 0.5) <= 1e-14);
    CHECK(std::abs(std::abs(f.R(1, 1)) - 0.2) <= 1e-14);
    check_factorization_consistency(a, f);
}

TEST_CASE("wcb_orth random instance against SVD oracle") {
    MatrixF a = testdata::gaussian(200, 6, 42);
    auto f = wcb_orth(a);
    check_factorization_consistency(a, f);
    CHECK(entrywise_pnorm(f.U, PNorm::of(2.0)) ==
          doctest::Approx(std::sqrt(6.0)).epsilon(1e-9));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_e(f.U));
    CHECK(svd.singularValues().minCoeff() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(svd.singularValues().maxCoeff() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("wcb_orth rejects rank-deficient input with detected rank") {
    MatrixF a(6, 3);
    for (std::size_t i = 0; i < 6; ++i) {
        a(i, 0) = static_cast<double>(i + 1);
        a(i, 2) = 2.0 * static_cast<double>(i + 1);  // col2 = 2*col0, col1 zero
    }
    try {
        wcb_orth(a);
        FAIL("expected RankDeficientError");
    } catch (const RankDeficientError& e) {
        CHECK(e.detected_rank() == 1);
    }
}

TEST_CASE("wcb_check accepts exact orthonormal certificates and rejects doctored ones") {
    MatrixF a = testdata::gaussian(80, 5, 3);
    auto f = wcb_orth(a);
    auto res = wcb_check(f, 200, 17);
    CHECK(res.pass);
    CHECK(res.worst_beta_ratio <= 1.0 + 1e-9);

    auto doctored = f;
    doctored.cert.alpha *= 0.5;
    auto res2 = wcb_check(doctored, 50, 17);
    CHECK(!res2.pass);
    CHECK(res2.worst_alpha_ratio > 1.0);
}

TEST_CASE("wcb_rounding identity stays identity-like") {
    for (double p : {1.0, 1.5, 3.0}) {
        MatrixF a = MatrixF::identity(4);
        auto f = wcb_rounding(a, PNorm::of(p));
        check_factorization_consistency(a, f);
        auto res = wcb_check(f, 300, 5);
        CHECK(res.pass);
        // Identity is already well conditioned: alpha is d^(1/p) x the rescale.
        CHECK(f.cert.alpha <= 2.0 * std::pow(4.0, 1.0 / p) + 1e-9);
    }
}

TEST_CASE("wcb_rounding certifies within safety factor on heavy-tailed data") {
    const std::size_t d = 3;
    MatrixF a = testdata::cauchy_rows(100, d, 11);
    auto f = wcb_rounding(a, PNorm::of(1.0));
    check_factorization_consistency(a, f);
    CHECK(f.cert.alpha <= 2.0 * std::pow(static_cast<double>(d), 1.5));
    CHECK(f.cert.beta <= 2.0);
    auto res = wcb_check(f, 10000, 23);
    CHECK(res.pass);
}

TEST_CASE("wcb_rounding leverage mass bounded by alpha^p") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        MatrixF a = testdata::gaussian(60, 4, 100 + seed);
        auto f = wcb_rounding(a, PNorm::of(1.0));
        double mass = 0.0;
        for (std::size_t i = 0; i < f.U.rows(); ++i) {
            mass += vector_pnorm(f.U.row(i), PNorm::of(1.0));
        }
        CHECK(mass <= std::pow(f.cert.alpha, 1.0) + 1e-6);
    }
}

TEST_CASE("wcb_check passes across methods and exponents") {
    int spc3_pass = 0, spc3_total = 0;
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        MatrixF a = testdata::gaussian(70, 4, 500 + seed);
        for (double p : {1.0, 1.5, 3.0}) {
            auto f = make_wcb(a, PNorm::of(p), WcbMethod::rounding, seed);
            CHECK(wcb_check(f, 300, 900 + seed).pass);
            auto fo = make_wcb(a, PNorm::of(p), WcbMethod::orth, seed);
            CHECK(wcb_check(fo, 300, 901 + seed).pass);
        }
        auto fs = wcb_spc3(a, seed);
        ++spc3_total;
        if (wcb_check(fs, 300, 902 + seed).pass) ++spc3_pass;
    }
    CHECK(spc3_pass >= static_cast<int>(0.8 * spc3_total));
}

TEST_CASE("wcb_spc3 deterministic given seed and identity passes") {
    MatrixF a = MatrixF::identity(5);
    auto f1 = wcb_spc3(a, 7);
    auto f2 = wcb_spc3(a, 7);
    CHECK(f1.U == f2.U);
    CHECK(f1.R == f2.R);
    CHECK(detail::numerical_rank(f1.U) == 5);
    CHECK(wcb_check(f1, 400, 33).pass);

    auto f3 = wcb_spc3(a, 8);
    CHECK(!(f3.U == f1.U));
}

TEST_CASE("lewis weights: identity fixed point") {
    auto res = lewis_weights(MatrixF::identity(4), PNorm::of(1.0));
    for (double w : res.weights) CHECK(w == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(res.converged);
}

TEST_CASE("lewis weights: p=2 equals closed-form leverage") {
    MatrixF a = testdata::gaussian(40, 3, 21);
    auto res = lewis_weights(a, PNorm::of(2.0));
    auto oracle = l2_leverage_oracle(a);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        CHECK(res.weights[i] == doctest::Approx(oracle[i]).epsilon(1e-8));
    }
}

TEST_CASE("lewis weights: p=1 mass and fixed-point residual") {
    MatrixF a = testdata::gaussian(50, 3, 77);
    const double tol = 1e-8;
    auto res = lewis_weights(a, PNorm::of(1.0), 500, tol);
    double sum = 0.0;
    for (double w : res.weights) sum += w;
    CHECK(sum == doctest::Approx(3.0).epsilon(1e-4));
    CHECK(res.residual <= 10.0 * tol);
}

TEST_CASE("lewis weights: exponent contract") {
    MatrixF a = testdata::gaussian(20, 3, 5);
    CHECK_THROWS_AS(lewis_weights(a, PNorm::of(1.5)), std::invalid_argument);
    CHECK_THROWS_AS(lewis_weights(a, PNorm::inf()), std::invalid_argument);
}
