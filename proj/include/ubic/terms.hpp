#pragma once

#include <compare>
#include <string>
#include <vector>

namespace ubic {

/// Candidate u^power * d^derivative u / dx^derivative; with derivative = 0
/// the term is u^power alone (so (1, 0) is u and (2, 0) is u^2).
struct CandidateTerm {
  int power = 0;
  int derivative = 0;

  auto operator<=>(const CandidateTerm&) const = default;

  /// Human-readable name, e.g. "u", "u_xx", "u^2*u_x".
  std::string name() const;
};

/// All (power, derivative) pairs with power <= max_power,
/// derivative <= max_deriv and power + derivative >= 1, in lexicographic order.
std::vector<CandidateTerm> enumerate_terms(int max_power, int max_deriv);

}  // namespace ubic
