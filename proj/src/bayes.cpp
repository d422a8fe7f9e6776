#include "ubic/bayes.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "ubic/error.hpp"
#include "ubic/parallel.hpp"

namespace ubic {

double coefficient_of_variation(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  const double l1 = mean.lpNorm<1>();
  if (l1 == 0.0) return std::numeric_limits<double>::infinity();
  return cov.diagonal().cwiseMax(0.0).cwiseSqrt().sum() / l1;
}

PosteriorModel posterior(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                         const SubsetModel& model, const Eigen::VectorXd& prior_mean,
                         const Eigen::MatrixXd& prior_cov) {
  const auto s = static_cast<Eigen::Index>(model.support.size());
  if (s == 0) throw InvalidArgument("posterior needs a non-empty support");
  if (prior_mean.size() != s || prior_cov.rows() != s || prior_cov.cols() != s)
    throw InvalidArgument("prior dimensions do not match the support");
  if (!prior_cov.isApprox(prior_cov.transpose(), 1e-12))
    throw InvalidArgument("prior covariance must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> prior_llt(prior_cov);
  if (prior_llt.info() != Eigen::Success) throw InvalidArgument("prior covariance must be positive definite");
  const Eigen::MatrixXd prior_precision = prior_llt.solve(Eigen::MatrixXd::Identity(s, s));

  Eigen::MatrixXd sub(phi.rows(), s);
  for (Eigen::Index m = 0; m < s; ++m) sub.col(m) = phi.col(static_cast<Eigen::Index>(model.support[static_cast<std::size_t>(m)]));

  PosteriorModel out;
  out.support = model.support;
  const double n = static_cast<double>(phi.rows());
  out.noise_var = (q0 - sub * model.coefficients).squaredNorm() / n;
  if (!(out.noise_var > kNoiseVarianceFloor)) {
    out.noise_var = kNoiseVarianceFloor;
    out.noise_clamped = true;
  }
  const double s2 = out.noise_var;

  Eigen::MatrixXd system = s2 * prior_precision + sub.transpose() * sub;
  system = 0.5 * (system + system.transpose());
  // Condition of the diagonally equilibrated system: column scaling of Phi
  // alone should not count as ill-conditioning.
  const Eigen::VectorXd scale = system.diagonal().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd equilibrated = scale.asDiagonal() * system * scale.asDiagonal();
  const Eigen::VectorXd eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(equilibrated, Eigen::EigenvaluesOnly).eigenvalues();
  if (!(eig[0] > 0.0) || eig[s - 1] / eig[0] > kMaxConditionNumber)
    throw NumericalError("posterior precision is ill-conditioned (condition estimate " +
                         std::to_string(eig[s - 1] / eig[0]) + ")");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
  // mu = A^-1 (s2 V0^-1 xi0 + Phi^T q0), V = s2 A^-1.
  out.mean = ldlt.solve(s2 * prior_precision * prior_mean + sub.transpose() * q0);
  out.covariance = s2 * ldlt.solve(Eigen::MatrixXd::Identity(s, s));
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  out.cv = coefficient_of_variation(out.mean, out.covariance);
  return out;
}

PosteriorModel posterior(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                         const SubsetModel& model) {
  const auto s = static_cast<Eigen::Index>(model.support.size());
  return posterior(phi, q0, model, model.coefficients, Eigen::MatrixXd::Identity(s, s));
}

UncertaintySweep uncertainty_sweep(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                                   const SubsetSweep& sweep) {
  if (sweep.models.empty()) throw InvalidArgument("empty subset sweep");
  UncertaintySweep out;
  out.posteriors.resize(sweep.models.size());
  parallel_for(sweep.models.size(), [&](std::size_t k) { out.posteriors[k] = posterior(phi, q0, sweep.models[k]); });
  double min_cv = std::numeric_limits<double>::infinity();
  for (const auto& p : out.posteriors) min_cv = std::min(min_cv, p.cv);
  if (!std::isfinite(min_cv)) throw NumericalError("every posterior mean vanished");
  out.u.resize(static_cast<Eigen::Index>(out.posteriors.size()));
  for (std::size_t k = 0; k < out.posteriors.size(); ++k)
    out.u[static_cast<Eigen::Index>(k)] = out.posteriors[k].cv / min_cv;
  return out;
}

UncertaintySweep uncertainty_sweep(const WeakLibrary& library, const SubsetSweep& sweep) {
  return uncertainty_sweep(library.phi, library.q0, sweep);
}

}  // namespace ubic
