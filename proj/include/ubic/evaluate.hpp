#pragma once

#include <variant>
#include <vector>

#include <Eigen/Core>

#include "ubic/datagen.hpp"
#include "ubic/select.hpp"
#include "ubic/terms.hpp"

namespace ubic {

struct TruthSpec {
  std::vector<CandidateTerm> terms;
  std::vector<double> coefficients;

  void validate() const;
};

TruthSpec truth_from(const PdeSpec& spec);

/// The discovered support differs from the true one.
struct FalseEquation {};

struct CoefficientError {
  double mean_percent = 0.0;
  std::vector<double> per_term;  // in truth order
};

using CeOutcome = std::variant<CoefficientError, FalseEquation>;

/// Mean of 100 |found_j - true_j| / |true_j| over the true terms, or
/// FalseEquation when the discovered term set is not the true term set.
CeOutcome percent_ce(const std::vector<CandidateTerm>& found_terms,
                     const Eigen::VectorXd& found_coefficients, const TruthSpec& truth);

/// min_k BIC_k - max_k BIC_k.
double r_bic(const ScoreTable& table);

}  // namespace ubic
