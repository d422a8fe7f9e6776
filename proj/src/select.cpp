#include "ubic/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ubic/error.hpp"

namespace ubic {
namespace {

std::size_t argmin(const std::vector<ScoreRecord>& records, double ScoreRecord::*field) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < records.size(); ++k)
    if (records[k].*field < records[best].*field) best = k;
  return best;
}

double resolve_gamma(const ScoreInputs& inputs, double gamma) {
  return gamma > 0.0 ? gamma : std::log(static_cast<double>(inputs.n_samples));
}

}  // namespace

void ScoreInputs::validate() const {
  if (n_samples < 1) throw InvalidArgument("score table needs a positive sample count");
  if (support_sizes.empty()) throw InvalidArgument("score table is empty");
  if (log_likelihood.size() != support_sizes.size() || u.size() != support_sizes.size())
    throw InvalidArgument("score table columns have different lengths");
}

double log_likelihood(std::size_t n_samples, double sse) {
  const double n = static_cast<double>(n_samples);
  sse = std::max(sse, kNoiseVarianceFloor * n);
  return -0.5 * n * std::log(2.0 * std::numbers::pi / n * sse);
}

double log_likelihood(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                      const Eigen::VectorXd& coefficients, const std::vector<std::size_t>& support) {
  Eigen::VectorXd residual = q0;
  for (std::size_t m = 0; m < support.size(); ++m)
    residual -= phi.col(static_cast<Eigen::Index>(support[m])) * coefficients[static_cast<Eigen::Index>(m)];
  return log_likelihood(static_cast<std::size_t>(phi.rows()), residual.squaredNorm());
}

ScoreInputs score_inputs(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                         const UncertaintySweep& uncertainty) {
  ScoreInputs in;
  in.n_samples = static_cast<std::size_t>(phi.rows());
  for (std::size_t k = 0; k < uncertainty.posteriors.size(); ++k) {
    const auto& post = uncertainty.posteriors[k];
    in.support_sizes.push_back(post.support_size());
    in.log_likelihood.push_back(log_likelihood(phi, q0, post.mean, post.support));
    in.u.push_back(uncertainty.u[static_cast<Eigen::Index>(k)]);
  }
  return in;
}

std::size_t ScoreTable::argmin_bic() const { return argmin(records, &ScoreRecord::bic); }
std::size_t ScoreTable::argmin_ubic() const { return argmin(records, &ScoreRecord::ubic); }

ScoreTable ubic(const ScoreInputs& inputs, double lambda_u, double gamma) {
  inputs.validate();
  if (!(lambda_u >= 0.0)) throw InvalidArgument("lambda_u must be non-negative");
  if (!(gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  ScoreTable table;
  table.n_samples = inputs.n_samples;
  table.lambda_u = lambda_u;
  table.gamma = gamma;
  const double log_n = std::log(static_cast<double>(inputs.n_samples));
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    ScoreRecord r;
    r.s = inputs.support_sizes[k];
    r.log_likelihood = inputs.log_likelihood[k];
    r.bic = -2.0 * r.log_likelihood + log_n * static_cast<double>(r.s);
    r.u = inputs.u[k];
    r.ubic = r.bic + lambda_u * gamma * r.u;
    table.records.push_back(r);
  }
  return table;
}

double lambda_max(const ScoreInputs& inputs, double gamma) {
  inputs.validate();
  const double log_n = std::log(static_cast<double>(inputs.n_samples));
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const double bound = (2.0 * inputs.log_likelihood[k] - log_n * static_cast<double>(inputs.support_sizes[k])) /
                         (gamma * inputs.u[k]);
    best = std::max(best, bound);
  }
  return best;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidArgument("percentile of an empty set");
  if (!(p >= 0.0 && p <= 100.0)) throw InvalidArgument("percentile must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Tau0Estimate tau0_heuristic(const ScoreInputs& inputs, double pct) {
  inputs.validate();
  const ScoreTable table = ubic(inputs, 0.0, 1.0);
  Tau0Estimate out;
  for (std::size_t k = 0; k + 1 < table.records.size(); ++k) {
    const auto& a = table.records[k];
    const auto& b = table.records[k + 1];
    if (!(b.bic < a.bic) || b.s <= a.s) break;
    out.improvements.push_back(std::abs((b.bic - a.bic) / (a.bic * static_cast<double>(b.s - a.s))));
  }
  if (out.improvements.empty()) {
    out.fallback = true;
    out.tau0 = kDefaultTau0;
  } else {
    out.tau0 = percentile(out.improvements, pct);
  }
  return out;
}

SelectionReport tune(const ScoreInputs& inputs, const TunerOptions& options) {
  inputs.validate();
  if (!(options.tau0 > 0.0)) throw InvalidArgument("tau0 must be positive");
  if (options.n_delta < 1) throw InvalidArgument("n_delta must be >= 1");
  const double gamma = resolve_gamma(inputs, options.gamma);

  SelectionReport report;
  report.tau0_used = options.tau0;
  report.lambda_max = lambda_max(inputs, gamma);
  const double start = report.lambda_max > 0.0 ? std::log10(report.lambda_max)
                                               : -std::numeric_limits<double>::infinity();
  auto lambda_u_of = [](double lambda) { return std::isfinite(lambda) ? std::pow(10.0, lambda) : 0.0; };

  double lambda = start;
  ScoreTable table = ubic(inputs, lambda_u_of(lambda), gamma);
  std::size_t incumbent = table.argmin_ubic();
  report.trace.push_back({lambda, incumbent, 0, 0.0, 0.0, false});

  if (start > 0.0) {
    for (int i = 1; i <= options.n_delta; ++i) {
      // Candidates are the evenly spaced points of [0, start], the last one exactly 0.
      const double candidate = start * static_cast<double>(options.n_delta - i) / options.n_delta;
      ScoreTable next = ubic(inputs, lambda_u_of(candidate), gamma);
      const std::size_t challenger = next.argmin_ubic();
      TunerStep step;
      step.lambda = candidate;
      step.argmin = challenger;
      step.delta_s = static_cast<long long>(table.records[challenger].s) -
                     static_cast<long long>(table.records[incumbent].s);
      step.delta_bic = table.records[challenger].bic - table.records[incumbent].bic;
      step.tau = step.delta_s == 0 ? 0.0
                                   : std::abs(step.delta_bic / (table.records[incumbent].bic *
                                                                static_cast<double>(step.delta_s)));
      step.terminated = (step.delta_s > 0 && (step.delta_bic > 0.0 || step.tau < options.tau0)) ||
                        (step.delta_s < 0 && step.delta_bic > 0.0 && step.tau > options.tau0);
      report.trace.push_back(step);
      if (step.terminated) break;
      lambda = candidate;
      table = std::move(next);
      incumbent = challenger;
    }
  }

  report.table = std::move(table);
  report.chosen = incumbent;
  report.lambda_u = lambda_u_of(lambda);
  if (incumbent > 0) {
    const double prev = report.table.records[incumbent - 1].bic;
    const double here = report.table.records[incumbent].bic;
    report.overfit_warning = std::abs(here - prev) / std::abs(prev) < options.tau0;
  }
  return report;
}

SelectionReport tune(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                     const UncertaintySweep& uncertainty, const TunerOptions& options) {
  return tune(score_inputs(phi, q0, uncertainty), options);
}

}  // namespace ubic
