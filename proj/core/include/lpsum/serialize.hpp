#pragma once

#include <string>

#include "json.hpp"
#include "lpsum/conditioning.hpp"
#include "lpsum/embedding.hpp"
#include "lpsum/leverage.hpp"
#include "lpsum/regression.hpp"

namespace lpsum {

nlohmann::json to_json(const WcbCertificate& cert);
nlohmann::json to_json(const WcbCheckResult& check);
nlohmann::json to_json(const RegressionSolution& sol);

/// {p, method, tau, adjust, kept_indices, scores_summary{min, max, sum}}.
nlohmann::json summary_report_json(const SummaryState& state);

/// List of {level, input_rows, output_rows, certified_distortion} nodes plus
/// the end-to-end factors.
nlohmann::json tree_trace_json(const EmbeddingResult& res);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace lpsum
