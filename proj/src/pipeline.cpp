#include "ubic/pipeline.hpp"

#include <cmath>
#include <fstream>

#include "ubic/datagen.hpp"
#include "ubic/denoise.hpp"
#include "ubic/error.hpp"

namespace ubic {
namespace {

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  const std::string prefix = std::string(name) + ": ";
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(prefix + e.what());
  } catch (const FormatError& e) {
    throw FormatError(prefix + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(prefix + e.what());
  } catch (const Error& e) {
    throw Error(prefix + e.what());
  }
}

Field acquire(const PipelineConfig& config) {
  if (!config.input.empty()) return read_field(config.input);
  PdeSpec spec = default_spec(*config.pde);
  if (config.nx) spec.x.count = config.nx;
  if (config.nt) spec.t.count = config.nt;
  return solve(spec, config.oversample);
}

Field denoise(const Field& noisy, const PipelineConfig& config) {
  switch (config.denoiser) {
    case Denoiser::None: return noisy;
    case Denoiser::Rksvd: {
      KsvdOptions options = config.ksvd;
      options.seed = dictionary_seed(config);
      return rksvd_denoise(noisy, options);
    }
    case Denoiser::Savgol: return savgol2d(noisy, config.savgol);
    case Denoiser::Svd: return svd_truncate(noisy, config.svd_rank);
  }
  return noisy;
}

SelectionReport select(const PipelineConfig& config, const ScoreInputs& inputs, double tau0) {
  TunerOptions options;
  options.tau0 = tau0;
  options.n_delta = config.n_delta;
  options.gamma = config.gamma;
  return tune(inputs, options);
}

bool same_terms(std::vector<CandidateTerm> a, std::vector<CandidateTerm> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
  stage("config", [&] { config.validate(); });
  PipelineResult r;
  r.config = config;

  Field raw = stage("generate", [&] { return acquire(config); });
  if (config.input.empty()) r.clean = raw;
  r.noisy = stage("noise", [&] { return add_noise(raw, {config.noise_percent, noise_seed(config)}); });
  r.denoised = stage("denoise", [&] { return denoise(*r.noisy, config); });

  const auto terms = enumerate_terms(config.max_power, config.max_deriv);
  const SubdomainSpec spec =
      stage("library", [&] {
        return default_subdomains(*r.denoised, config.n_domains, config.hx_frac, config.ht_frac,
                                  subdomain_seed(config), config.effective_weight_power());
      });
  r.library = stage("library", [&] { return build(*r.denoised, terms, spec, config.intercept); });

  const std::size_t max_s = config.max_support ? std::min(config.max_support, r.library.n_candidates())
                                               : r.library.n_candidates();
  r.sweep = stage("sweep", [&] { return sweep(r.library, max_s, config.solver, config.subset_budget); });
  r.uncertainty = stage("posterior", [&] { return uncertainty_sweep(r.library, r.sweep); });
  r.inputs = stage("posterior", [&] { return score_inputs(r.library.phi, r.library.q0, r.uncertainty); });

  stage("tune", [&] {
    if (config.tau0_mode == Tau0Mode::Fixed) {
      r.report = select(config, r.inputs, config.tau0);
      return;
    }
    r.tau0_estimate = tau0_heuristic(r.inputs, config.tau0_percentile);
    r.report = select(config, r.inputs, r.tau0_estimate->tau0);
    if (r.report.overfit_warning && !r.tau0_estimate->fallback) {
      const double retry = percentile(r.tau0_estimate->improvements, config.tau0_retry_percentile);
      r.report = select(config, r.inputs, retry);
      r.tau0_retried = true;
    }
  });

  const PosteriorModel& chosen = r.uncertainty.posteriors.at(r.report.chosen);
  for (std::size_t idx : chosen.support)
    if (idx < r.library.terms.size()) r.chosen_terms.push_back(r.library.terms[idx]);
  r.chosen_coefficients = chosen.mean;
  if (config.denoised_wf_alpha > 1) {
    stage("refit", [&] {
      const WeakLibrary smooth = denoised_build(*r.denoised, terms, spec, config.denoised_wf_alpha, config.intercept);
      r.chosen_coefficients = fit_support(smooth.phi, smooth.q0, chosen.support).coefficients;
      r.refit = true;
    });
  }

  stage("evaluate", [&] {
    r.r_bic = r_bic(r.report.table);
    if (const auto truth_pde = config.truth_pde()) {
      r.truth = truth_from(default_spec(*truth_pde));
      const bool has_intercept = r.chosen_terms.size() != chosen.support.size();
      r.ce = has_intercept ? CeOutcome{FalseEquation{}}
                           : percent_ce(r.chosen_terms, r.chosen_coefficients, *r.truth);
    }
  });

  if (!config.output_dir.empty()) stage("write", [&] { write_artifacts(r, config.output_dir); });
  return r;
}

Json PipelineResult::report_json() const {
  Json j = report_to_json(report, uncertainty, library);
  Json run;
  run["pde"] = config.pde ? to_string(*config.pde) : "input";
  run["noise_percent"] = config.noise_percent;
  run["seed"] = config.seed;
  run["denoiser"] = to_string(config.denoiser);
  run["solver"] = to_string(config.solver);
  run["tau0_mode"] = config.tau0_mode == Tau0Mode::Fixed ? "fixed" : "percentile";
  run["tau0_retried"] = tau0_retried;
  if (tau0_estimate) run["tau0_fallback"] = tau0_estimate->fallback;
  j["run"] = run;
  Json chosen = Json::array();
  for (const auto& t : chosen_terms) chosen.push_back(t.name());
  j["chosen_terms"] = chosen;
  if (refit)
    j["refit_coefficients"] = std::vector<double>(chosen_coefficients.data(),
                                                  chosen_coefficients.data() + chosen_coefficients.size());
  if (ce) j["evaluation"] = evaluation_to_json(*ce, r_bic);
  else j["evaluation"] = Json{{"r_bic", r_bic}};
  return j;
}

void write_artifacts(const PipelineResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (r.clean) write_field(*r.clean, dir / "clean.field");
  if (r.noisy) write_field(*r.noisy, dir / "noisy.field");
  if (r.denoised) write_field(*r.denoised, dir / "denoised.field");
  write_library(r.library, dir / "library.bin");
  write_json(sweep_to_json(r.sweep, r.library), dir / "sweep.json");
  write_json(r.report_json(), dir / "report.json");
  write_scores_csv(r.report.table, dir / "scores.csv");
}

std::vector<Tau0SweepRow> tau0_sweep(const PipelineResult& result, const std::vector<double>& taus) {
  std::vector<Tau0SweepRow> rows;
  rows.reserve(taus.size());
  for (double tau : taus) {
    const SelectionReport rep = select(result.config, result.inputs, tau);
    Tau0SweepRow row{tau, rep.chosen_support_size(), false};
    if (result.truth) {
      std::vector<CandidateTerm> found;
      for (std::size_t idx : result.sweep.models.at(rep.chosen).support)
        if (idx < result.library.terms.size()) found.push_back(result.library.terms[idx]);
      row.success = found.size() == rep.chosen_support_size() && same_terms(found, result.truth->terms);
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> parse_range(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = spec.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos)
    throw InvalidArgument("range must look like start:stop:count, got '" + spec + "'");
  double lo = 0.0, hi = 0.0;
  long long n = 0;
  try {
    lo = std::stod(spec.substr(0, a));
    hi = std::stod(spec.substr(a + 1, b - a - 1));
    n = std::stoll(spec.substr(b + 1));
  } catch (const std::exception&) {
    throw InvalidArgument("cannot parse range '" + spec + "'");
  }
  if (n < 1) throw InvalidArgument("range count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

}  // namespace ubic
