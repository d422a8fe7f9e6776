#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ubic/bayes.hpp"
#include "ubic/config.hpp"
#include "ubic/evaluate.hpp"
#include "ubic/grid.hpp"
#include "ubic/select.hpp"
#include "ubic/serialize.hpp"
#include "ubic/subset.hpp"
#include "ubic/weaklib.hpp"

namespace ubic {

struct PipelineResult {
  PipelineConfig config;
  std::optional<Field> clean;     // generated runs only
  std::optional<Field> noisy;
  std::optional<Field> denoised;  // equals noisy when no denoiser runs
  WeakLibrary library;
  SubsetSweep sweep;
  UncertaintySweep uncertainty;
  ScoreInputs inputs;
  std::optional<Tau0Estimate> tau0_estimate;  // percentile mode
  bool tau0_retried = false;
  SelectionReport report;
  std::vector<CandidateTerm> chosen_terms;
  Eigen::VectorXd chosen_coefficients;  // posterior mean, or the smoothed-library refit
  bool refit = false;
  std::optional<TruthSpec> truth;
  std::optional<CeOutcome> ce;
  double r_bic = 0.0;

  bool false_equation() const { return ce && std::holds_alternative<FalseEquation>(*ce); }
  Json report_json() const;
};

/// generate or ingest -> noise -> denoise -> weak library -> subset sweep ->
/// posteriors -> tuner -> evaluation. Errors are rethrown with the failing
/// stage name prefixed. Writes artifacts when config.output_dir is set.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Files written to `dir`: clean.field (generated runs), noisy.field,
/// denoised.field, library.bin, sweep.json, report.json, scores.csv.
void write_artifacts(const PipelineResult& result, const std::filesystem::path& dir);

struct Tau0SweepRow {
  double tau0 = 0.0;
  std::size_t chosen_s = 0;
  bool success = false;  // chosen term set equals the truth
};

/// Reruns the tuner on the stored score inputs once per tau0.
std::vector<Tau0SweepRow> tau0_sweep(const PipelineResult& result, const std::vector<double>& taus);

/// "a:b:n" -> n evenly spaced values from a to b inclusive.
std::vector<double> parse_range(const std::string& spec);

}  // namespace ubic
