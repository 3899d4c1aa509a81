#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "lpsum/datasets.hpp"
#include "lpsum/io.hpp"
#include "lpsum/lowrank.hpp"
#include "lpsum/pnorm.hpp"
#include "lpsum/regression.hpp"

namespace lpsum {

/// One harness run: a dataset (generated or loaded), the summary methods to
/// compare, space budgets, and the trial seeds for row permutations.
struct ExperimentSpec {
    std::string dataset = "census-like";  // generator name, or "file"
    GenParams params;
    std::string input_path;  // when dataset == "file", a [A | b] csv/mm file
    MatrixFormat format = MatrixFormat::csv;
    std::uint64_t data_seed = 1;

    std::vector<std::string> methods = {"orth", "spc3", "identity", "sample"};
    std::vector<std::size_t> budgets;
    double tau = 0.0;    // 0: threshold rule alpha^p / m per block
    double eps = 0.1;
    double gamma = 0.5;
    std::size_t rank = 1;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::size_t trials = 5;
    std::string out_dir;

    void validate() const;
    Dataset materialize() const;
};

struct MetricRow {
    std::string method;
    std::size_t budget_m = 0;
    std::uint64_t seed = 0;
    double error_ratio = 0.0;  // fhat / fstar - 1
    std::size_t max_summary_rows = 0;
    double update_time_s = 0.0;
    double query_time_s = 0.0;
    double total_time_s = 0.0;
    double fhat = 0.0;
    double fstar = 0.0;
};

struct ExperimentReport {
    std::vector<MetricRow> rows;
    std::string csv;          // deterministic fields; byte-reproducible
    std::string timings_csv;  // wall-clock columns, not reproducibility-gated
    nlohmann::json manifest;
};

/// Streaming summary under a hard working-set budget of m rows, following the
/// per-block reduce of the chosen method (conditioning methods threshold
/// local scores at alpha^p/m with that block's certified alpha; the
/// no-conditioning baseline thresholds row-norm surrogates at 2/m; sampling
/// keeps a uniform reservoir of exactly m rows).
struct BudgetSummary {
    MatrixF rows;  // retained [A | b] rows
    std::vector<std::size_t> origin;
    std::size_t max_rows_after_reduce = 0;
    double update_time_s = 0.0;
};
BudgetSummary budget_stream_summary(const MatrixF& joint, std::size_t budget_m,
                                    const std::string& method, std::uint64_t seed);

/// The section-style comparison: solve the reduced Chebyshev problem per
/// method x budget x trial permutation and report fhat/fstar - 1 against the
/// exact full-data optimum.
ExperimentReport run_linf_experiment(const ExperimentSpec& spec);

/// Per-node certified distortion table of the merge-and-reduce tree plus the
/// measured end-to-end ratio range over sampled directions.
ExperimentReport run_embed_experiment(const ExperimentSpec& spec);

/// Product error against the eps ||A||_1 ||B||_1 bound over an eps grid, both
/// factor thresholding directions.
ExperimentReport run_amm_experiment(const ExperimentSpec& spec);

/// (l1_error, reference optimum, ratio) triples of the tree pipeline on tiny
/// spiked rank-1 instances.
ExperimentReport run_lowrank_experiment(const ExperimentSpec& spec);

/// Writes <name>.csv and <name>.manifest.json under spec.out_dir (which must
/// exist or be creatable).
void write_report(const ExperimentSpec& spec, const std::string& name,
                  const ExperimentReport& report);

}  // namespace lpsum
