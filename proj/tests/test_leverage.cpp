#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "lpsum/leverage.hpp"
#include "support/testdata.hpp"

using namespace lpsum;

namespace {

// Plants one row aligned with an otherwise-unused coordinate direction.
MatrixF with_planted_direction(std::size_t n, std::size_t d, double magnitude,
                               std::size_t at, std::uint64_t seed) {
    MatrixF a = testdata::gaussian(n, d, seed);
    for (std::size_t j = 0; j < d; ++j) a(at, j) = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i != at) a(i, d - 1) = 0.0;
    }
    a(at, d - 1) = magnitude;
    return a;
}

}  // namespace

TEST_CASE("leverage scores on identity basis") {
    auto f = wcb_orth(MatrixF::identity(4));
    f.cert.p = PNorm::of(1.0);
    auto w = leverage_scores(f);
    for (double wi : w) CHECK(wi == doctest::Approx(1.0));
}

TEST_CASE("leverage score of an explicit row") {
    WcbFactorization f;
    f.U = MatrixF({{0.5, 0.5}, {1.0, 0.0}});
    f.R = MatrixF::identity(2);
    f.S = MatrixF::identity(2);
    f.cert = WcbCertificate{2.0, 1.0, PNorm::of(2.0), WcbMethod::orth};
    auto w = leverage_scores(f);
    CHECK(w[0] == doctest::Approx(0.5));
    CHECK(w[1] == doctest::Approx(1.0));
}

TEST_CASE("score mass never exceeds alpha^p") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        MatrixF a = testdata::gaussian(80, 5, 40 + seed);
        for (double p : {1.0, 2.0, 3.0}) {
            auto f = make_wcb(a, PNorm::of(p), WcbMethod::rounding, seed);
            auto w = leverage_scores(f);
            const double mass = std::accumulate(w.begin(), w.end(), 0.0);
            CHECK(mass <= std::pow(f.cert.alpha, p) + 1e-6);
        }
    }
}

TEST_CASE("lev_score_check keeps strictly-above-threshold rows") {
    MatrixF eye = MatrixF::identity(3);
    auto f = wcb_orth(eye);
    auto [kept_half, idx_half] = lev_score_check(f, eye, 0.5);
    CHECK(idx_half == std::vector<std::size_t>{0, 1, 2});
    CHECK(kept_half == eye);

    auto [kept_one, idx_one] = lev_score_check(f, eye, 1.0);
    CHECK(idx_one.empty());
    CHECK(kept_one.rows() == 0);

    MatrixF wrong(2, 3);
    CHECK_THROWS_AS(lev_score_check(f, wrong, 0.5), std::invalid_argument);
}

TEST_CASE("lev_score_check surfaces a planted heavy row") {
    const std::size_t n = 101, d = 4;
    MatrixF a = testdata::gaussian(n, d, 7);
    for (std::size_t j = 0; j < d; ++j) a(50, j) *= 100.0;
    auto f = make_wcb(a, PNorm::of(1.0), WcbMethod::rounding, 0);
    auto scores = leverage_scores(f);
    const double top = *std::max_element(scores.begin(), scores.end());
    CHECK(scores[50] == doctest::Approx(top));
    auto [kept, idx] = lev_score_check(f, a, 0.5 * top);
    CHECK(std::find(idx.begin(), idx.end(), 50) != idx.end());
}

TEST_CASE("stream keeps planted identity directions") {
    const std::size_t n = 400, d = 5;
    MatrixF a = with_planted_direction(n, d, 1.0, 123, 3);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j + 1 < d; ++j) a(i, j) *= 10.0;  // data dominates
    }
    auto stream = block_iter(a, 4 * d);
    auto st = stream_high_leverage(stream, PNorm::of(2.0), 0.5, WcbMethod::orth, 1);
    CHECK(std::find(st.origin.begin(), st.origin.end(), 123) != st.origin.end());
    // Retained rows carry original values.
    for (std::size_t k = 0; k < st.origin.size(); ++k) {
        if (st.origin[k] == 123) {
            CHECK(st.B(k, d - 1) == 1.0);
        }
    }
}

TEST_CASE("maximal threshold keeps nothing when mass is spread") {
    MatrixF a = testdata::gaussian(500, 4, 9);
    auto f = wcb_orth(a);
    const double alpha_p = std::pow(f.cert.alpha, 2.0);
    // No single row can strictly exceed the total score mass.
    auto [kept, idx] = lev_score_check(f, a, alpha_p);
    CHECK(idx.empty());
    CHECK(kept.rows() == 0);
}

TEST_CASE("stream size cap and planted heavy direction") {
    const std::size_t n = 500, d = 4;
    MatrixF a = with_planted_direction(n, d, 50.0, 250, 17);
    auto f0 = wcb_orth(a);
    const double alpha_p = std::pow(f0.cert.alpha, 2.0);
    const double tau = 0.3 * alpha_p;
    auto stream = block_iter(a, 8 * d);
    auto st = stream_high_leverage(stream, PNorm::of(2.0), tau, WcbMethod::orth, 1);
    CHECK(std::find(st.origin.begin(), st.origin.end(), 250) != st.origin.end());
    const double cap = static_cast<double>(d) * alpha_p * alpha_p * 1.0 / tau;
    CHECK(static_cast<double>(st.max_rows_after_reduce) <= cap);
}

TEST_CASE("streaming output is a superset of offline high-leverage rows") {
    // The guarantee under test: every row whose offline global score exceeds
    // tau appears in the stream output, for the same basis method.
    for (std::uint64_t inst = 0; inst < 4; ++inst) {
        const std::size_t n = 300 + 100 * inst, d = 4;
        MatrixF a = testdata::gaussian(n, d, 600 + inst);
        for (std::size_t i = 0; i < n; i += 97) {
            for (std::size_t j = 0; j < d; ++j) a(i, j) *= 30.0;  // heavy rows
        }
        struct Cfg { PNorm p; WcbMethod m; };
        for (const auto& cfg : {Cfg{PNorm::of(2.0), WcbMethod::orth},
                                Cfg{PNorm::of(1.0), WcbMethod::rounding}}) {
            auto fg = make_wcb(a, cfg.p, cfg.m, 5);
            auto wg = leverage_scores(fg);
            const double tau = 0.25 * std::pow(fg.cert.alpha, cfg.p.value());
            std::vector<std::size_t> offline;
            for (std::size_t i = 0; i < n; ++i) {
                if (wg[i] > tau) offline.push_back(i);
            }
            for (std::uint64_t perm = 0; perm < 3; ++perm) {
                std::vector<std::size_t> order(n);
                std::iota(order.begin(), order.end(), 0);
                Rng rng(perm, 0x7065726dULL);
                for (std::size_t i = n - 1; i > 0; --i) {
                    std::swap(order[i], order[rng.below(i + 1)]);
                }
                MatrixF shuffled = a.select_rows(order);
                auto stream = block_iter(shuffled, 6 * d);
                auto st = stream_high_leverage(stream, cfg.p, tau, cfg.m, 11);
                std::vector<bool> present(n, false);
                for (std::size_t o : st.origin) present[order[o]] = true;
                for (std::size_t i : offline) CHECK(present[i]);
            }
        }
    }
}

TEST_CASE("local scores drop by at most the certified factor") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        MatrixF a = testdata::gaussian(60, 3, 800 + seed);
        std::vector<std::size_t> block(30);
        std::iota(block.begin(), block.end(), 0);
        for (double p : {1.0, 1.5, 3.0}) {
            auto gap = local_global_gap(a, block, PNorm::of(p), WcbMethod::rounding, seed);
            for (const auto& pr : gap.pairs) {
                CHECK(pr.local_score >= pr.global_score / gap.drop_factor - 1e-12);
            }
        }
        // Classical ell_2 sanity: local leverage never drops below global.
        auto gap2 = local_global_gap(a, block, PNorm::of(2.0), WcbMethod::orth, seed);
        for (const auto& pr : gap2.pairs) {
            CHECK(pr.local_score >= pr.global_score - 1e-9);
        }
    }
}

TEST_CASE("block equal to the whole matrix gives identical scores") {
    MatrixF a = testdata::gaussian(40, 3, 15);
    std::vector<std::size_t> all(40);
    std::iota(all.begin(), all.end(), 0);
    auto gap = local_global_gap(a, all, PNorm::of(1.0), WcbMethod::rounding, 2);
    for (const auto& pr : gap.pairs) {
        CHECK(pr.local_score == doctest::Approx(pr.global_score).epsilon(1e-9));
    }
}

TEST_CASE("surrogate scores") {
    auto w = surrogate_scores(MatrixF::identity(4));
    for (double wi : w) CHECK(wi == doctest::Approx(0.25));
    // Threshold rule 2/m with m=4 keeps nothing at 0.25.
    int kept = 0;
    for (double wi : w) {
        if (wi > 2.0 / 4.0) ++kept;
    }
    CHECK(kept == 0);

    MatrixF b(10, 1);
    b(0, 0) = 10.0;
    for (std::size_t i = 1; i < 10; ++i) b(i, 0) = 1.0;
    auto w2 = surrogate_scores(b);
    CHECK(w2[0] == doctest::Approx(100.0 / 109.0));

    CHECK_THROWS_AS(surrogate_scores(MatrixF(3, 3)), std::invalid_argument);
}

TEST_CASE("uniform sample basics and determinism") {
    MatrixF a = testdata::gaussian(5, 2, 1);
    auto s1 = block_iter(a, 2);
    auto r1 = uniform_sample(s1, 10, 42);
    CHECK(r1.rows.rows() == 5);

    MatrixF big = testdata::gaussian(2000, 3, 2);
    auto sa = block_iter(big, 128);
    auto sb = block_iter(big, 128);
    auto ra = uniform_sample(sa, 100, 7);
    auto rb = uniform_sample(sb, 100, 7);
    CHECK(ra.rows == rb.rows);
    CHECK(ra.origin == rb.origin);
    auto sc = block_iter(big, 128);
    auto rc = uniform_sample(sc, 100, 8);
    CHECK(!(rc.origin == ra.origin));
}

TEST_CASE("uniform sample inclusion frequencies") {
    const std::size_t n = 10000, m = 100, trials = 2000;
    std::vector<std::uint32_t> counts(n, 0);
    MatrixF a(n, 1);
    for (std::size_t i = 0; i < n; ++i) a(i, 0) = static_cast<double>(i);
    for (std::uint64_t seed = 0; seed < trials; ++seed) {
        auto s = block_iter(a, n);
        auto r = uniform_sample(s, m, seed);
        for (std::size_t o : r.origin) ++counts[o];
    }
    const double expect = static_cast<double>(m) / n;  // 0.01
    // Binomial(2000, 0.01): keep every row within six standard deviations and
    // the grand mean exact.
    const double sd = std::sqrt(trials * expect * (1.0 - expect));
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += counts[i];
        CHECK(std::abs(counts[i] - trials * expect) <= 6.0 * sd);
    }
    CHECK(total == doctest::Approx(static_cast<double>(trials * m)));
}
