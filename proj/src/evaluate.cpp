#include "ubic/evaluate.hpp"

#include <algorithm>
#include <cmath>

#include "ubic/error.hpp"

namespace ubic {

void TruthSpec::validate() const {
  if (terms.size() != coefficients.size()) throw InvalidArgument("truth terms and coefficients differ in length");
  for (double c : coefficients)
    if (c == 0.0) throw InvalidArgument("true coefficients must be nonzero");
}

TruthSpec truth_from(const PdeSpec& spec) {
  TruthSpec truth;
  for (const auto& [term, coef] : spec.coefficients) {
    truth.terms.push_back(term);
    truth.coefficients.push_back(coef);
  }
  return truth;
}

CeOutcome percent_ce(const std::vector<CandidateTerm>& found_terms,
                     const Eigen::VectorXd& found_coefficients, const TruthSpec& truth) {
  truth.validate();
  if (found_terms.size() != static_cast<std::size_t>(found_coefficients.size()))
    throw InvalidArgument("found terms and coefficients differ in length");
  auto sorted = [](std::vector<CandidateTerm> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sorted(found_terms) != sorted(truth.terms)) return FalseEquation{};

  CoefficientError err;
  for (std::size_t j = 0; j < truth.terms.size(); ++j) {
    const auto it = std::find(found_terms.begin(), found_terms.end(), truth.terms[j]);
    const double found = found_coefficients[it - found_terms.begin()];
    err.per_term.push_back(100.0 * std::abs(found - truth.coefficients[j]) / std::abs(truth.coefficients[j]));
  }
  double total = 0.0;
  for (double e : err.per_term) total += e;
  err.mean_percent = total / static_cast<double>(err.per_term.size());
  return err;
}

double r_bic(const ScoreTable& table) {
  if (table.records.empty()) throw InvalidArgument("empty score table");
  double lo = table.records.front().bic, hi = lo;
  for (const auto& r : table.records) {
    lo = std::min(lo, r.bic);
    hi = std::max(hi, r.bic);
  }
  return lo - hi;
}

}  // namespace ubic
