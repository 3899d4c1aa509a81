#include <cmath>

#include "doctest.h"
#include "lpsum/amm.hpp"
#include "lpsum/pnorm.hpp"
#include "support/testdata.hpp"

using namespace lpsum;

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

std::vector<double> random_unit_l1(std::size_t n, Rng& rng, bool nonneg) {
    std::vector<double> v(n);
    double mass = 0.0;
    for (auto& x : v) {
        x = rng.exponential();
        mass += x;
    }
    for (auto& x : v) x /= mass;
    if (!nonneg) {
        for (auto& x : v) {
            if (rng.uniform() < 0.5) x = -x;
        }
    }
    return v;
}

double l1_product_error_rowwise(const MatrixF& a, const MatrixF& b,
                                const AmmSketch& sk) {
    MatrixF abar = densify(sk.a, a.cols(), false);
    MatrixF bbar = densify(sk.b, b.cols(), false);
    MatrixF exact = matmul(a, b.transposed());
    MatrixF approx = matmul(abar, bbar.transposed());
    double err = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        err += std::abs(exact.data()[i] - approx.data()[i]);
    }
    return err;
}

}  // namespace

TEST_CASE("threshold_vector worked examples") {
    std::vector<double> e1 = {1.0, 0.0, 0.0};
    auto t1 = threshold_vector(e1, 0.5, 1.0);
    REQUIRE(t1.kept.size() == 1);
    CHECK(t1.kept[0] == std::pair<std::size_t, double>{0, 1.0});

    std::vector<double> quarters = {0.25, 0.25, 0.25, 0.25};
    CHECK(threshold_vector(quarters, 0.6, 1.0).kept.empty());

    std::vector<double> mix = {0.6, 0.3, 0.1};
    auto t3 = threshold_vector(mix, 0.5, 1.0);
    REQUIRE(t3.kept.size() == 2);
    CHECK(t3.kept[0].second == 0.6);
    CHECK(t3.kept[1].second == 0.3);

    CHECK_THROWS_AS(threshold_vector(mix, 2.0, 1.0), std::invalid_argument);
}

TEST_CASE("kept entries never exceed 2/eps") {
    Rng rng(3, 0);
    for (double eps : {0.05, 0.2, 0.7}) {
        for (int rep = 0; rep < 20; ++rep) {
            auto v = random_unit_l1(200, rng, false);
            auto t = threshold_vector(v, eps, vector_pnorm(v, PNorm::of(1.0)));
            CHECK(static_cast<double>(t.kept.size()) <= 2.0 / eps);
        }
    }
}

TEST_CASE("sketched inner product basics") {
    std::vector<double> e1 = {1.0, 0.0};
    CHECK(sketch_inner_product(e1, e1, 0.3) == 1.0);

    std::vector<double> unif(10, 0.1);
    const double approx = sketch_inner_product(unif, unif, 0.25);
    CHECK(approx == 0.0);  // threshold 0.125 beats every entry
    CHECK(std::abs(dot(unif, unif) - approx) <= 0.25);
}

TEST_CASE("nonnegative sandwich and signed two-sided bound") {
    Rng rng(7, 1);
    for (int rep = 0; rep < 1000; ++rep) {
        auto x = random_unit_l1(40, rng, true);
        auto y = random_unit_l1(40, rng, true);
        const double exact = dot(x, y);
        const double approx = sketch_inner_product(x, y, 0.1);
        CHECK(approx <= exact + 1e-15);
        CHECK(approx >= exact - 0.1);
    }
    for (int rep = 0; rep < 1000; ++rep) {
        auto x = random_unit_l1(40, rng, false);
        auto y = random_unit_l1(40, rng, false);
        CHECK(std::abs(dot(x, y) - sketch_inner_product(x, y, 0.1)) <= 0.1);
    }
}

TEST_CASE("rowwise product: identity is exact") {
    MatrixF eye = MatrixF::identity(5);
    auto sk = amm_rowwise(eye, eye, 1.9);
    CHECK(l1_product_error_rowwise(eye, eye, sk) == 0.0);
    for (const auto& row : sk.a) CHECK(row.kept.size() == 1);
}

TEST_CASE("rowwise product error bound on random data") {
    Rng rng(11, 2);
    for (int rep = 0; rep < 10; ++rep) {
        MatrixF a(20, 15), b(20, 15);
        const bool nonneg = rep % 2 == 0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            a.data()[i] = nonneg ? rng.exponential() : rng.normal();
            b.data()[i] = nonneg ? rng.exponential() : rng.normal();
        }
        auto sk = amm_rowwise(a, b, 0.3);
        CHECK(l1_product_error_rowwise(a, b, sk) <= sk.error_bound * (1.0 + 1e-12));
    }
}

TEST_CASE("near-maximal eps drops uniform rows entirely") {
    MatrixF a(6, 8);
    for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] = 0.125;
    auto sk = amm_rowwise(a, a, 1.999);
    for (const auto& row : sk.a) CHECK(row.kept.empty());
    CHECK(l1_product_error_rowwise(a, a, sk) <= sk.error_bound * (1.0 + 1e-12));
}

TEST_CASE("streaming columns: trivial single-column case") {
    MatrixF col(5, 1);
    col(0, 0) = 1.0;
    auto sa = block_iter(col, 2);
    auto sb = block_iter(col, 2);
    auto sk = amm_streaming_columns(sa, sb, 0.5);
    REQUIRE(sk.a[0].kept.size() == 1);
    CHECK(sk.a[0].kept[0].second == 1.0);
}

TEST_CASE("streaming kept set equals the offline rule exactly") {
    Rng rng(13, 3);
    for (int rep = 0; rep < 30; ++rep) {
        MatrixF a(50, 8);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a.data()[i] = rng.normal() * (rng.uniform() < 0.1 ? 10.0 : 1.0);
        }
        const double eps = 0.1 + 0.02 * rep;
        auto s1 = block_iter(a, 7);
        auto s2 = block_iter(a, 7);
        auto sk = amm_streaming_columns(s1, s2, eps);
        for (std::size_t j = 0; j < 8; ++j) {
            std::vector<double> col(50);
            for (std::size_t i = 0; i < 50; ++i) col[i] = a(i, j);
            auto offline = threshold_vector(col, eps, vector_pnorm(col, PNorm::of(1.0)));
            CHECK(sk.a[j].kept == offline.kept);
            CHECK(static_cast<double>(sk.a[j].kept.size()) <= 2.0 / eps);
        }
    }
}

TEST_CASE("streaming columnwise product error bound") {
    Rng rng(17, 4);
    MatrixF a(50, 8), b(50, 8);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a.data()[i] = rng.exponential();
        b.data()[i] = rng.exponential();
    }
    auto s1 = block_iter(a, 16);
    auto s2 = block_iter(b, 16);
    auto sk = amm_streaming_columns(s1, s2, 0.2);
    MatrixF abar = densify(sk.a, 50, true);
    MatrixF bbar = densify(sk.b, 50, true);
    MatrixF exact = matmul(a.transposed(), b);
    MatrixF approx = matmul(abar.transposed(), bbar);
    double err = 0.0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        err += std::abs(exact.data()[i] - approx.data()[i]);
    }
    CHECK(err <= sk.error_bound * (1.0 + 1e-12));
}
