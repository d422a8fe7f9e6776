#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "ubic/bayes.hpp"
#include "ubic/evaluate.hpp"
#include "ubic/select.hpp"
#include "ubic/subset.hpp"
#include "ubic/weaklib.hpp"

namespace ubic {

using Json = nlohmann::ordered_json;

Json term_json(const CandidateTerm& term);
CandidateTerm term_from_json(const Json& j);

/// {"solver", "models": [{"s", "support", "terms", "coefficients", "sse"}]}
Json sweep_to_json(const SubsetSweep& sweep, const WeakLibrary& library);
SubsetSweep sweep_from_json(const Json& j);

/// {n_omega, gamma, lambda_u, lambda_max, tau0, chosen_support_size, warning,
///  scores: [{s, logL, bic, u, ubic}], coefficients: [{term: {d1, d2}, mean, sd}],
///  trace: [{lambda, argmin_s, delta_s, delta_bic, tau, terminated}]}
Json report_to_json(const SelectionReport& report, const UncertaintySweep& uncertainty,
                    const WeakLibrary& library);

/// Score table and chosen model recovered from a report document.
ScoreTable scores_from_report(const Json& report);
void chosen_model_from_report(const Json& report, std::vector<CandidateTerm>& terms,
                              Eigen::VectorXd& coefficients);

Json evaluation_to_json(const CeOutcome& ce, double r_bic);

void write_json(const Json& j, const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);

/// s, logL, bic, u, ubic per row: score-vs-support curves for plotting.
void write_scores_csv(const ScoreTable& table, const std::filesystem::path& path);

}  // namespace ubic
