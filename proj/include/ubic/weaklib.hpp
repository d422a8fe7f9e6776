#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ubic/grid.hpp"
#include "ubic/terms.hpp"

namespace ubic {

/// Random rectangular integration subdomains with weight
/// w = (xbar^2 - 1)^P (tbar^2 - 1)^P, xbar = (x - xc) / H_x, tbar = (t - tc) / H_t.
/// Half widths are snapped to a whole number of grid spacings and centers are
/// drawn on grid nodes, so every rectangle starts and ends on a sample.
struct SubdomainSpec {
  std::size_t n_domains = 500;
  double half_width_x = 0.0;
  double half_width_t = 0.0;
  std::uint64_t seed = 0;
  int weight_power = 2;
};

/// n_domains rectangles whose half widths are the given fractions of the axis extents.
SubdomainSpec default_subdomains(const Field& field, std::size_t n_domains = 500,
                                 double hx_fraction = 0.1, double ht_fraction = 0.1,
                                 std::uint64_t seed = 0, int weight_power = 2);

/// A subdomain as inclusive index ranges [x0, x0 + 2 kx] x [t0, t0 + 2 kt].
struct Subdomain {
  std::size_t x0 = 0;
  std::size_t t0 = 0;
};

struct SubdomainLayout {
  std::size_t half_x = 0;   // kx, in samples
  std::size_t half_t = 0;   // kt, in samples
  double hx = 0.0;          // effective physical half widths kx * dx, kt * dt
  double ht = 0.0;
  std::vector<Subdomain> domains;
};

/// Validates the spec against the grid and draws the subdomains.
SubdomainLayout layout_subdomains(const Field& field, const SubdomainSpec& spec);

/// k-th derivative of (z^2 - 1)^power at z.
double weight_derivative(int power, int k, double z);

struct WeakLibrary {
  Eigen::MatrixXd phi;               // N_omega x N_q
  Eigen::VectorXd q0;                // N_omega
  std::vector<CandidateTerm> terms;  // column j < terms.size() is terms[j]
  bool include_intercept = false;    // last column is the integral of w
  SubdomainSpec spec;

  std::size_t n_samples() const { return static_cast<std::size_t>(phi.rows()); }
  std::size_t n_candidates() const { return static_cast<std::size_t>(phi.cols()); }
  std::string column_name(std::size_t j) const;
};

/// Weak-form target q0_i = -int (dw/dt) u and candidate integrals over each
/// subdomain by the 2D trapezoidal rule. Candidate columns:
///   u^p:            int w u^p
///   d^d u:          (-1)^d int (d^d w / dx^d) u
///   u^p u_x:        -1/(p + 1) int (dw/dx) u^(p+1)
///   u^p d^d u, d>1: int w u^p D^d u, D^d by centered finite differences.
/// Requires weight_power >= the highest pure derivative order.
WeakLibrary build(const Field& field, const std::vector<CandidateTerm>& terms,
                  const SubdomainSpec& spec, bool include_intercept = false);

/// As build, but each subdomain's block of the field is first smoothed by a
/// 2D Savitzky-Golay filter (window alpha on both axes, order 2). alpha <= 1
/// disables the smoothing.
WeakLibrary denoised_build(const Field& field, const std::vector<CandidateTerm>& terms,
                           const SubdomainSpec& spec, std::size_t alpha,
                           bool include_intercept = false);

/// Header JSON line, then N_omega x (1 + N_q) little-endian doubles, row-major,
/// column 0 holding q0.
void write_library(const WeakLibrary& library, const std::filesystem::path& path);
WeakLibrary read_library(const std::filesystem::path& path);

}  // namespace ubic
