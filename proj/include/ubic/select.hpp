#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "ubic/bayes.hpp"

namespace ubic {

/// Per-model quantities the criteria are computed from, ordered by support size.
struct ScoreInputs {
  std::size_t n_samples = 0;
  std::vector<std::size_t> support_sizes;
  std::vector<double> log_likelihood;
  std::vector<double> u;

  std::size_t size() const { return support_sizes.size(); }
  void validate() const;
};

/// logL = -(N / 2) log((2 pi / N) sse); sse below kNoiseVarianceFloor * N is clamped.
double log_likelihood(std::size_t n_samples, double sse);
double log_likelihood(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                      const Eigen::VectorXd& coefficients, const std::vector<std::size_t>& support);

/// Log-likelihoods at the posterior means and the normalized uncertainties.
ScoreInputs score_inputs(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                         const UncertaintySweep& uncertainty);

struct ScoreRecord {
  std::size_t s = 0;
  double log_likelihood = 0.0;
  double bic = 0.0;
  double u = 0.0;
  double ubic = 0.0;
};

struct ScoreTable {
  std::vector<ScoreRecord> records;
  std::size_t n_samples = 0;
  double lambda_u = 0.0;
  double gamma = 0.0;

  std::size_t argmin_bic() const;   // first index on ties
  std::size_t argmin_ubic() const;
};

/// bic_k = -2 logL_k + log(N) s_k and ubic_k = bic_k + lambda_u * gamma * u_k.
ScoreTable ubic(const ScoreInputs& inputs, double lambda_u, double gamma);

/// max_k (2 logL_k - log(N) s_k) / (gamma u_k); with gamma = log N this is the
/// largest lambda_u keeping every UBIC penalty below |2 logL_k|.
double lambda_max(const ScoreInputs& inputs, double gamma);

/// p-th percentile (0..100) by linear interpolation between order statistics
/// (position p / 100 * (n - 1) in the sorted sample).
double percentile(std::vector<double> values, double p);

inline constexpr double kDefaultTau0 = 0.02;

struct Tau0Estimate {
  double tau0 = kDefaultTau0;
  bool fallback = false;              // no BIC-decreasing pair; default returned
  std::vector<double> improvements;   // the set the percentile is taken over
};

/// Improvement factors |dBIC / (BIC_k1 (s_k2 - s_k1))| of successive models
/// k1 -> k2 = k1 + 1 for as long as the BIC keeps strictly decreasing from the
/// smallest support, and their `pct`-th percentile.
Tau0Estimate tau0_heuristic(const ScoreInputs& inputs, double pct = 75.0);

struct TunerOptions {
  double tau0 = kDefaultTau0;
  int n_delta = 3;
  double gamma = 0.0;  // <= 0: log(N_omega)
};

struct TunerStep {
  double lambda = 0.0;        // log10 of the lambda_u evaluated
  std::size_t argmin = 0;     // index of the UBIC minimizer at this lambda
  long long delta_s = 0;      // support-size change against the incumbent
  double delta_bic = 0.0;
  double tau = 0.0;
  bool terminated = false;    // the step that triggered the stopping rule
};

struct SelectionReport {
  ScoreTable table;           // scores at the returned lambda_u
  std::size_t chosen = 0;     // index into table.records
  double lambda_u = 0.0;
  double lambda_max = 0.0;
  double tau0_used = kDefaultTau0;
  bool overfit_warning = false;
  std::vector<TunerStep> trace;

  std::size_t chosen_support_size() const { return table.records[chosen].s; }
};

/// Adaptive lambda_u search. Starting at lambda = log10(lambda_max) (pure BIC
/// when lambda_max <= 0), lambda is lowered in n_delta equal steps down to 0;
/// each step moves to the new UBIC minimizer unless
///   (ds > 0 and (dBIC > 0 or tau < tau0)) or (ds < 0 and dBIC > 0 and tau > tau0)
/// where tau = |dBIC / (BIC_incumbent ds)| (tau = 0 when ds = 0). Flags a
/// possible overfit when the chosen model improves the BIC of the next
/// smaller one by a relative amount below tau0.
SelectionReport tune(const ScoreInputs& inputs, const TunerOptions& options = {});
SelectionReport tune(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                     const UncertaintySweep& uncertainty, const TunerOptions& options = {});

}  // namespace ubic
