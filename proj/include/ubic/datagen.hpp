#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ubic/grid.hpp"
#include "ubic/terms.hpp"

namespace ubic {

enum class Pde { Burgers, KdV, KS };

enum class InitialCondition {
  Gaussian,   // exp(-(x + 2)^2)
  NegSine,    // -sin(pi x / 20)
  KsCosine,   // cos(x / 16) (1 + sin(x / 16))
  Zero,
};

/// A 1D evolution equation u_t = sum_j c_j term_j with its initial condition
/// and sampling axes. The coefficient list doubles as the ground truth.
struct PdeSpec {
  Pde name = Pde::Burgers;
  std::vector<std::pair<CandidateTerm, double>> coefficients;
  InitialCondition initial_condition = InitialCondition::Gaussian;
  Axis x;
  Axis t;
};

/// Burgers: u_t = 0.1 u_xx - u u_x,            256 x 101 on [-8, 8] x [0, 10]
/// KdV:     u_t = -u_xxx - u u_x,               512 x 501 on [-20, 20] x [0, 40]
/// KS:      u_t = -u_xx - u_xxxx - u u_x,      1024 x 251 on [0, 32 pi] x [0, 100]
PdeSpec default_spec(Pde pde);

Pde parse_pde(const std::string& name);
std::string to_string(Pde pde);

double initial_value(InitialCondition ic, double x);

/// Integrates the PDE with a Fourier pseudo-spectral ETDRK4 scheme on the
/// periodic domain [x.min, x.max) (period x.max - x.min; the sample at x.max
/// duplicates x.min). Pure-derivative terms form the stiff linear part;
/// u^p u_x terms are advanced as d/dx(u^(p+1))/(p+1) with 2/3 de-aliasing.
/// The internal step is t-spacing / (50 * oversample).
/// Throws NumericalError on blow-up, InvalidArgument for unsupported terms.
Field solve(const PdeSpec& spec, int oversample = 1);

}  // namespace ubic
