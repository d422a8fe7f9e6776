#include "ubic/terms.hpp"

#include "ubic/error.hpp"

namespace ubic {

std::string CandidateTerm::name() const {
  std::string u_part;
  if (power == 1) u_part = "u";
  if (power > 1) u_part = "u^" + std::to_string(power);
  std::string d_part;
  if (derivative > 0) d_part = "u_" + std::string(static_cast<std::size_t>(derivative), 'x');
  if (power == 0) return d_part;
  if (derivative == 0) return u_part;
  return u_part + "*" + d_part;
}

std::vector<CandidateTerm> enumerate_terms(int max_power, int max_deriv) {
  if (max_power < 0 || max_deriv < 0) throw InvalidArgument("term bounds must be >= 0");
  std::vector<CandidateTerm> terms;
  for (int p = 0; p <= max_power; ++p)
    for (int d = 0; d <= max_deriv; ++d)
      if (p + d >= 1) terms.push_back({p, d});
  return terms;
}

}  // namespace ubic
