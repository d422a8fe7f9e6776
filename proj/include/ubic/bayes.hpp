#pragma once

#include <vector>

#include <Eigen/Core>

#include "ubic/subset.hpp"

namespace ubic {

/// Gaussian posterior of the coefficients of one support under a conjugate
/// Gaussian prior and the maximum-likelihood noise variance.
struct PosteriorModel {
  std::vector<std::size_t> support;
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  double noise_var = 0.0;
  double cv = 0.0;             // sum_j sqrt(V_jj) / |mean|_1; +inf when the mean vanishes
  bool noise_clamped = false;  // perfect fit: noise variance raised to the floor

  std::size_t support_size() const { return support.size(); }
};

inline constexpr double kNoiseVarianceFloor = 1e-30;
inline constexpr double kMaxConditionNumber = 1e14;

/// Conjugate update
///   V  = s2 (s2 V0^-1 + Phi^T Phi)^-1
///   mu = V V0^-1 xi0 + V Phi^T q0 / s2
/// with s2 = SSE / N_omega of the model's OLS fit and Phi restricted to the support.
PosteriorModel posterior(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                         const SubsetModel& model, const Eigen::VectorXd& prior_mean,
                         const Eigen::MatrixXd& prior_cov);

/// Default prior: mean = the OLS coefficients, covariance = identity.
PosteriorModel posterior(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                         const SubsetModel& model);

/// sum_j sqrt(cov_jj) / |mean|_1.
double coefficient_of_variation(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov);

struct UncertaintySweep {
  std::vector<PosteriorModel> posteriors;
  Eigen::VectorXd u;  // cv_k / min_k cv_k
};

UncertaintySweep uncertainty_sweep(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                                   const SubsetSweep& sweep);
UncertaintySweep uncertainty_sweep(const WeakLibrary& library, const SubsetSweep& sweep);

}  // namespace ubic
