#include "lpsum/serialize.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

namespace lpsum {

namespace {

nlohmann::json pnorm_json(const PNorm& p) {
    if (p.is_inf()) return "inf";
    return p.value();
}

}  // namespace

nlohmann::json to_json(const WcbCertificate& cert) {
    return nlohmann::json{{"alpha", cert.alpha},
                          {"beta", cert.beta},
                          {"p", pnorm_json(cert.p)},
                          {"method", wcb_method_name(cert.method)}};
}

nlohmann::json to_json(const WcbCheckResult& check) {
    return nlohmann::json{{"pass", check.pass},
                          {"worst_alpha_ratio", check.worst_alpha_ratio},
                          {"worst_beta_ratio", check.worst_beta_ratio}};
}

nlohmann::json to_json(const RegressionSolution& sol) {
    nlohmann::json j{{"x", sol.x},
                     {"objective", sol.objective},
                     {"method", sol.method},
                     {"iterations", sol.iterations},
                     {"converged", sol.converged}};
    if (sol.certified_gap.has_value()) j["certified_gap"] = *sol.certified_gap;
    return j;
}

nlohmann::json summary_report_json(const SummaryState& state) {
    nlohmann::json scores_summary;
    if (state.kept_scores.empty()) {
        scores_summary = {{"min", 0.0}, {"max", 0.0}, {"sum", 0.0}};
    } else {
        scores_summary = {
            {"min", *std::min_element(state.kept_scores.begin(), state.kept_scores.end())},
            {"max", *std::max_element(state.kept_scores.begin(), state.kept_scores.end())},
            {"sum", std::accumulate(state.kept_scores.begin(), state.kept_scores.end(), 0.0)}};
    }
    return nlohmann::json{{"p", pnorm_json(state.last_cert.p)},
                          {"method", wcb_method_name(state.last_cert.method)},
                          {"tau", state.tau},
                          {"adjust", state.adjust},
                          {"kept_indices", state.origin},
                          {"scores_summary", scores_summary},
                          {"rank_flagged", state.rank_flagged},
                          {"max_rows_after_reduce", state.max_rows_after_reduce},
                          {"blocks_processed", state.blocks_processed}};
}

nlohmann::json tree_trace_json(const EmbeddingResult& res) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : res.trace) {
        nodes.push_back({{"level", n.level},
                         {"input_rows", n.input_rows},
                         {"output_rows", n.output_rows},
                         {"certified_distortion", n.certified_distortion}});
    }
    return nlohmann::json{{"nodes", nodes},
                          {"levels_used", res.levels_used},
                          {"per_level_distortion_bound", res.per_level_distortion_bound},
                          {"total_lower_factor", res.total_lower_factor},
                          {"certified_lower_product", res.certified_lower_product},
                          {"summary_rows", res.T.rows()},
                          {"rank_flagged", res.rank_flagged}};
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

}  // namespace lpsum
