#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "lpsum/experiments.hpp"
#include "lpsum/rng.hpp"
#include "lpsum/serialize.hpp"

using namespace lpsum;

TEST_CASE("augmented-identity plants exactly k isolated directions") {
    GenParams p;
    p.n = 1000;
    p.d = 8;
    p.k = 3;
    auto ds = gen_dataset(DatasetKind::augmented_identity, p, 7);
    CHECK(ds.a.cols() == 11);
    CHECK(ds.planted_rows.size() == 3);
    std::size_t isolated = 0;
    for (std::size_t i = 0; i < ds.a.rows(); ++i) {
        bool base_part = false, appended_part = false;
        for (std::size_t j = 0; j < 8; ++j) base_part |= ds.a(i, j) != 0.0;
        for (std::size_t j = 8; j < 11; ++j) appended_part |= ds.a(i, j) != 0.0;
        if (appended_part) {
            CHECK(!base_part);
            ++isolated;
        }
    }
    CHECK(isolated == 3);
}

TEST_CASE("generators are reproducible for a fixed seed") {
    GenParams p;
    p.n = 100;
    p.d = 4;
    for (auto kind : {DatasetKind::gaussian, DatasetKind::heavytail,
                      DatasetKind::census_like}) {
        auto d1 = gen_dataset(kind, p, 42);
        auto d2 = gen_dataset(kind, p, 42);
        CHECK(d1.a == d2.a);
        CHECK(d1.b == d2.b);
        auto d3 = gen_dataset(kind, p, 43);
        CHECK(!(d3.a == d1.a));
    }
}

TEST_CASE("census-like data is duplicated, sparse, and integer-quantized") {
    GenParams p;
    p.n = 2000;
    p.d = 8;
    auto ds = gen_dataset(DatasetKind::census_like, p, 3);
    std::set<std::vector<double>> distinct;
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < ds.a.rows(); ++i) {
        std::vector<double> row(ds.a.row(i).begin(), ds.a.row(i).end());
        distinct.insert(row);
        for (double v : row) {
            if (v == 0.0) ++zeros;
            CHECK(v == std::round(v));
        }
    }
    const double dup_rate =
        1.0 - static_cast<double>(distinct.size()) / static_cast<double>(ds.a.rows());
    CHECK(dup_rate >= 0.4);
    const double zero_frac =
        static_cast<double>(zeros) / static_cast<double>(ds.a.size());
    CHECK(zero_frac >= 0.25);
    CHECK(zero_frac <= 0.85);
}

TEST_CASE("sampling at full budget reproduces the data and a zero error ratio") {
    ExperimentSpec spec;
    spec.dataset = "gaussian";
    spec.params.n = 120;
    spec.params.d = 4;
    spec.params.noise = 0.5;
    spec.methods = {"sample"};
    spec.budgets = {200};
    spec.trials = 2;
    spec.seeds = {1, 2};
    auto report = run_linf_experiment(spec);
    REQUIRE(report.rows.size() == 2);
    for (const auto& row : report.rows) {
        CHECK(row.error_ratio <= 1e-9);
        CHECK(row.max_summary_rows == 120);
    }
}

TEST_CASE("conditioning methods keep planted rows, the surrogate misses them") {
    ExperimentSpec spec;
    spec.dataset = "augmented-identity";
    spec.params.n = 400;
    spec.params.d = 6;
    spec.params.k = 3;
    spec.params.scale = 12.0;  // dense block dominates the unit rows
    spec.params.noise = 0.5;

    auto ds = spec.materialize();
    MatrixF joint = joint_matrix(ds);
    int identity_misses = 0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const std::size_t m = 16 * joint.cols();
        // Permute, then track where the planted rows land.
        std::vector<std::size_t> order(joint.rows());
        std::iota(order.begin(), order.end(), 0);
        Rng rng(seed, 0x7472696cULL);
        for (std::size_t i = order.size() - 1; i > 0; --i) {
            std::swap(order[i], order[rng.below(i + 1)]);
        }
        MatrixF permuted = joint.select_rows(order);
        std::set<std::size_t> planted;
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            if (std::binary_search(ds.planted_rows.begin(), ds.planted_rows.end(),
                                   order[pos])) {
                planted.insert(pos);
            }
        }
        for (const std::string method : {"orth", "spc3"}) {
            auto summary = budget_stream_summary(permuted, m, method, seed);
            std::size_t found = 0;
            for (std::size_t o : summary.origin) found += planted.count(o);
            CHECK(found == planted.size());
            CHECK(summary.max_rows_after_reduce <= m);
        }
        auto surrogate = budget_stream_summary(permuted, m, "identity", seed);
        std::size_t found = 0;
        for (std::size_t o : surrogate.origin) found += planted.count(o);
        if (found < planted.size()) ++identity_misses;
    }
    CHECK(identity_misses >= 3);  // misses in at least half the trials
}

TEST_CASE("experiment reports are byte-reproducible") {
    ExperimentSpec spec;
    spec.dataset = "census-like";
    spec.params.n = 600;
    spec.params.d = 5;
    spec.params.noise = 2.0;
    spec.methods = {"orth", "sample"};
    spec.budgets = {20, 40};
    spec.trials = 2;
    spec.seeds = {3, 4};
    auto r1 = run_linf_experiment(spec);
    auto r2 = run_linf_experiment(spec);
    CHECK(r1.csv == r2.csv);
    CHECK(r1.manifest == r2.manifest);
    for (const auto& row : r1.rows) {
        CHECK(row.fhat >= row.fstar * (1.0 - 1e-9));
    }
}

TEST_CASE("module drivers run and uphold their asserted bounds") {
    ExperimentSpec spec;
    spec.dataset = "gaussian";
    spec.params.n = 256;
    spec.params.d = 3;
    auto embed = run_embed_experiment(spec);
    CHECK(embed.csv.find("certified_distortion") != std::string::npos);
    auto amm = run_amm_experiment(spec);
    CHECK(std::count(amm.csv.begin(), amm.csv.end(), '\n') == 21);  // header + grid
    auto lr = run_lowrank_experiment(spec);
    CHECK(lr.csv.find("ratio") != std::string::npos);
}
