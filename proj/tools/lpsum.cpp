// Command line front end: dataset generation, streaming summaries, the
// embed/regress/lowrank/amm pipelines, and the experiment harness.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>

#include "CLI11.hpp"
#include "lpsum/amm.hpp"
#include "lpsum/experiments.hpp"
#include "lpsum/serialize.hpp"

using namespace lpsum;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

PNorm parse_p(const std::string& s) {
    if (s == "inf" || s == "INF" || s == "infinity") return PNorm::inf();
    return PNorm::of(std::stod(s));
}

MatrixF load_input(const std::string& path, const std::string& format, bool header) {
    return load_matrix(path, format_from_name(format), header);
}

void split_joint(const MatrixF& joint, MatrixF& a, std::vector<double>& b) {
    if (joint.cols() < 2) {
        throw std::invalid_argument("expected an [A | b] matrix with >= 2 columns");
    }
    std::vector<std::size_t> cols(joint.cols() - 1);
    std::iota(cols.begin(), cols.end(), 0);
    a = joint.select_cols(cols);
    b.resize(joint.rows());
    for (std::size_t i = 0; i < joint.rows(); ++i) b[i] = joint(i, joint.cols() - 1);
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

struct CommonOpts {
    std::string input;
    std::string format = "csv";
    bool header = false;
    std::string p = "2";
    std::string method = "orth";
    double gamma = 0.5;
    std::size_t budget = 0;
    std::size_t block = 0;
    double tau = 0.1;
    double eps = 0.1;
    std::uint64_t seed = 1;
    std::size_t trials = 5;
    std::string out;
};

void add_io_flags(CLI::App* cmd, CommonOpts& o, bool required_input = true) {
    auto* in = cmd->add_option("--input", o.input, "input matrix file");
    if (required_input) in->required();
    cmd->add_option("--format", o.format, "input format: csv or mm")->default_str("csv");
    cmd->add_flag("--header", o.header, "skip one CSV header line");
    cmd->add_option("--out", o.out, "output directory");
}

int run(int argc, char** argv) {
    CLI::App app{"streaming and distributed p-norm matrix summaries"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic [A | b] dataset");
    std::string gen_name = "gaussian";
    GenParams gp;
    std::uint64_t gen_seed = 1;
    std::string gen_out = "dataset.csv";
    gen->add_option("--name", gen_name, "gaussian|heavytail|augmented-identity|census-like");
    gen->add_option("--n", gp.n, "rows");
    gen->add_option("--d", gp.d, "columns");
    gen->add_option("--k", gp.k, "planted directions (augmented-identity)");
    gen->add_option("--noise", gp.noise, "target noise scale");
    gen->add_option("--scale", gp.scale, "dense-part magnitude");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output CSV path")->required();

    // leverage
    auto* lev = app.add_subcommand("leverage", "stream high-leverage rows of a matrix");
    CommonOpts lo;
    add_io_flags(lev, lo);
    lev->add_option("--p", lo.p, "norm exponent or inf");
    lev->add_option("--method", lo.method, "orth|spc3|rounding");
    lev->add_option("--tau", lo.tau, "global score threshold");
    lev->add_option("--block", lo.block, "stream block rows (default 4d)");
    lev->add_option("--seed", lo.seed, "seed for randomized methods");

    // embed
    auto* emb = app.add_subcommand("embed", "merge-and-reduce subspace summary");
    CommonOpts eo;
    add_io_flags(emb, eo);
    emb->add_option("--p", eo.p, "norm exponent (finite)");
    emb->add_option("--method", eo.method, "orth|spc3|rounding");
    emb->add_option("--gamma", eo.gamma, "block exponent in (0,1)");
    emb->add_option("--block", eo.block, "override block rows");
    std::size_t fanout = 0;
    emb->add_option("--fanout", fanout, "0 = streaming deep tree, >=2 balanced tree");
    emb->add_option("--seed", eo.seed, "seed for randomized methods");

    // regress
    auto* reg = app.add_subcommand("regress", "p-norm regression on [A | b]");
    CommonOpts ro;
    add_io_flags(reg, ro);
    reg->add_option("--p", ro.p, "norm exponent (finite) or inf for exact Chebyshev");
    reg->add_option("--method", ro.method, "orth|spc3|rounding");
    reg->add_option("--gamma", ro.gamma, "block exponent");
    reg->add_option("--block", ro.block, "override block rows");
    reg->add_option("--seed", ro.seed, "seed");
    bool reg_exact = false;
    reg->add_flag("--exact", reg_exact, "solve on the full data instead of a summary");

    // linf
    auto* linf = app.add_subcommand("linf", "streaming additive-error Chebyshev regression");
    CommonOpts fo;
    add_io_flags(linf, fo);
    linf->add_option("--p", fo.p, "leverage exponent (finite)");
    linf->add_option("--eps", fo.eps, "additive error parameter in (0,1)");
    linf->add_option("--method", fo.method, "orth|spc3|rounding");
    linf->add_option("--block", fo.block, "stream block rows (default 8d)");
    linf->add_option("--seed", fo.seed, "seed");

    // lowrank
    auto* lr = app.add_subcommand("lowrank", "entrywise-l1 low rank approximation");
    CommonOpts ko;
    add_io_flags(lr, ko);
    std::size_t rank = 1;
    std::string mode = "enumerated";
    lr->add_option("--rank", rank, "target rank (<= 2 enumerated)");
    lr->add_option("--mode", mode, "enumerated|randomized");
    lr->add_option("--gamma", ko.gamma, "block exponent");
    lr->add_option("--block", ko.block, "override block rows");
    lr->add_option("--seed", ko.seed, "seed");

    // amm
    auto* amm = app.add_subcommand("amm", "thresholded approximate matrix product");
    CommonOpts ao;
    add_io_flags(amm, ao);
    std::string input2;
    bool columns = false;
    amm->add_option("--input2", input2, "second factor (defaults to the first)");
    amm->add_option("--eps", ao.eps, "threshold parameter in (0,2)");
    amm->add_flag("--columns", columns, "columnwise streaming rule (A^T B)");

    // experiment
    auto* exp = app.add_subcommand("experiment", "reduced-vs-exact comparison harness");
    ExperimentSpec spec;
    std::string kind = "linf";
    exp->add_option("--kind", kind, "linf|embed|amm|lowrank");
    exp->add_option("--dataset", spec.dataset, "generator name or 'file'");
    exp->add_option("--input", spec.input_path, "input path when --dataset file");
    std::string exp_format = "csv";
    exp->add_option("--format", exp_format, "csv or mm");
    exp->add_option("--n", spec.params.n, "rows");
    exp->add_option("--d", spec.params.d, "columns");
    exp->add_option("--k", spec.params.k, "planted directions");
    exp->add_option("--noise", spec.params.noise, "noise scale");
    exp->add_option("--scale", spec.params.scale, "dense-part magnitude");
    exp->add_option("--data-seed", spec.data_seed, "dataset seed");
    exp->add_option("--methods", spec.methods, "summary methods to compare");
    exp->add_option("--budgets", spec.budgets, "space budgets (rows)");
    exp->add_option("--tau", spec.tau, "fixed threshold (0: alpha^p/m rule)");
    exp->add_option("--eps", spec.eps, "eps for eps-driven drivers");
    exp->add_option("--gamma", spec.gamma, "tree block exponent");
    exp->add_option("--rank", spec.rank, "target rank for the lowrank driver");
    exp->add_option("--seeds", spec.seeds, "trial seeds");
    exp->add_option("--trials", spec.trials, "number of trials");
    exp->add_option("--out", spec.out_dir, "report directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        auto ds = gen_dataset(dataset_kind_from_name(gen_name), gp, gen_seed);
        save_csv(joint_matrix(ds), gen_out);
        nlohmann::json meta{{"name", ds.name},
                            {"rows", ds.a.rows()},
                            {"cols", ds.a.cols()},
                            {"planted_rows", ds.planted_rows},
                            {"out", gen_out}};
        std::cout << meta.dump(2) << "\n";
        return kExitOk;
    }

    if (lev->parsed()) {
        MatrixF m = load_input(lo.input, lo.format, lo.header);
        const std::size_t block = lo.block ? lo.block : 4 * m.cols();
        auto stream = block_iter(m, block);
        auto state = stream_high_leverage(stream, parse_p(lo.p), lo.tau,
                                          wcb_method_from_name(lo.method), lo.seed);
        std::cout << summary_report_json(state).dump(2) << "\n";
        if (!lo.out.empty()) {
            ensure_dir(lo.out);
            save_csv(state.B, lo.out + "/kept_rows.csv");
            write_text_file(lo.out + "/leverage_report.json",
                            summary_report_json(state).dump(2) + "\n");
        }
        return kExitOk;
    }

    if (emb->parsed()) {
        MatrixF m = load_input(eo.input, eo.format, eo.header);
        TreeConfig cfg;
        cfg.gamma = eo.gamma;
        cfg.p = parse_p(eo.p);
        cfg.method = wcb_method_from_name(eo.method);
        cfg.seed = eo.seed;
        cfg.block_rows = eo.block;
        auto res = tree_simulate(m, cfg, fanout);
        std::cout << tree_trace_json(res).dump(2) << "\n";
        if (!eo.out.empty()) {
            ensure_dir(eo.out);
            save_csv(res.T, eo.out + "/summary.csv");
            write_text_file(eo.out + "/tree_trace.json",
                            tree_trace_json(res).dump(2) + "\n");
        }
        return kExitOk;
    }

    if (reg->parsed()) {
        MatrixF joint = load_input(ro.input, ro.format, ro.header);
        RegressionInstance inst;
        split_joint(joint, inst.a, inst.b);
        inst.p = parse_p(ro.p);
        RegressionSolution sol;
        if (inst.p.is_inf()) {
            sol = solve_linf_exact(inst);
        } else if (reg_exact) {
            sol = solve_lp_regression(inst);
        } else {
            TreeConfig cfg;
            cfg.gamma = ro.gamma;
            cfg.method = wcb_method_from_name(ro.method);
            cfg.seed = ro.seed;
            cfg.block_rows = ro.block;
            sol = regress_via_embedding(inst, cfg);
        }
        std::cout << to_json(sol).dump(2) << "\n";
        if (!ro.out.empty()) {
            ensure_dir(ro.out);
            write_text_file(ro.out + "/solution.json", to_json(sol).dump(2) + "\n");
        }
        return sol.converged ? kExitOk : kExitSolver;
    }

    if (linf->parsed()) {
        MatrixF joint = load_input(fo.input, fo.format, fo.header);
        const std::size_t block = fo.block ? fo.block : 8 * joint.cols();
        auto stream = block_iter(joint, block);
        auto res = linf_additive_stream(stream, parse_p(fo.p), fo.eps,
                                        wcb_method_from_name(fo.method), fo.seed);
        RegressionInstance full;
        split_joint(joint, full.a, full.b);
        full.p = PNorm::inf();
        nlohmann::json j{{"solution", to_json(res.solution)},
                         {"objective_full_data", residual_norm(full, res.solution.x)},
                         {"rows_kept", res.summary.B.rows()},
                         {"kept_by_leverage", res.kept_by_leverage},
                         {"kept_by_target", res.kept_by_b},
                         {"b_norm_estimate", res.b_norm_estimate},
                         {"summary", summary_report_json(res.summary)}};
        std::cout << j.dump(2) << "\n";
        if (!fo.out.empty()) {
            ensure_dir(fo.out);
            write_text_file(fo.out + "/linf_stream.json", j.dump(2) + "\n");
        }
        return res.solution.converged ? kExitOk : kExitSolver;
    }

    if (lr->parsed()) {
        MatrixF m = load_input(ko.input, ko.format, ko.header);
        TreeConfig cfg;
        cfg.gamma = ko.gamma;
        cfg.block_rows = ko.block ? ko.block : derive_block_rows(m.rows(), ko.gamma);
        cfg.block_rows = std::max(cfg.block_rows, m.cols());
        auto p1 = block_iter(m, cfg.block_rows);
        auto p2 = block_iter(m, cfg.block_rows);
        const InnerMode im =
            mode == "randomized" ? InnerMode::randomized : InnerMode::enumerated;
        auto res = l1_lowrank_tree(p1, p2, rank, cfg, im, ko.seed);
        nlohmann::json meta{{"k", res.k},
                            {"l1_error", res.l1_error},
                            {"mode", mode},
                            {"rank_padded", res.rank_padded}};
        std::cout << meta.dump(2) << "\n";
        if (!ko.out.empty()) {
            ensure_dir(ko.out);
            save_csv(res.left, ko.out + "/left.csv");
            save_csv(res.right, ko.out + "/right.csv");
            write_text_file(ko.out + "/lowrank.json", meta.dump(2) + "\n");
        }
        return kExitOk;
    }

    if (amm->parsed()) {
        MatrixF a = load_input(ao.input, ao.format, ao.header);
        MatrixF b = input2.empty() ? a : load_input(input2, ao.format, ao.header);
        AmmSketch sk;
        if (columns) {
            auto sa = block_iter(a, std::max<std::size_t>(a.rows(), 1));
            auto sb = block_iter(b, std::max<std::size_t>(b.rows(), 1));
            sk = amm_streaming_columns(sa, sb, ao.eps);
        } else {
            sk = amm_rowwise(a, b, ao.eps);
        }
        std::size_t kept = 0;
        for (const auto& v : sk.a) kept += v.kept.size();
        for (const auto& v : sk.b) kept += v.kept.size();
        nlohmann::json meta{{"eps", sk.eps},
                            {"columnwise", sk.columnwise},
                            {"error_bound", sk.error_bound},
                            {"kept_entries", kept}};
        std::cout << meta.dump(2) << "\n";
        if (!ao.out.empty()) {
            ensure_dir(ao.out);
            write_text_file(ao.out + "/amm_sketch.csv", sparse_triples_csv(sk));
            write_text_file(ao.out + "/amm.json", meta.dump(2) + "\n");
        }
        return kExitOk;
    }

    if (exp->parsed()) {
        spec.format = format_from_name(exp_format);
        ExperimentReport report;
        if (kind == "linf") {
            report = run_linf_experiment(spec);
        } else if (kind == "embed") {
            report = run_embed_experiment(spec);
        } else if (kind == "amm") {
            report = run_amm_experiment(spec);
        } else if (kind == "lowrank") {
            report = run_lowrank_experiment(spec);
        } else {
            throw std::invalid_argument("unknown experiment kind '" + kind + "'");
        }
        write_report(spec, kind, report);
        std::cout << "wrote " << spec.out_dir << "/" << kind << ".csv ("
                  << std::count(report.csv.begin(), report.csv.end(), '\n') - 1
                  << " rows)\n";
        return kExitOk;
    }

    return kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const RoundingConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const RankDeficientError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::logic_error& e) {
        std::cerr << "internal invariant failed: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::runtime_error& e) {
        const std::string what = e.what();
        std::cerr << "error: " << what << "\n";
        const bool solverish = what.find("stall") != std::string::npos ||
                               what.find("converge") != std::string::npos ||
                               what.find("simplex") != std::string::npos;
        return solverish ? kExitSolver : kExitInput;
    }
}
