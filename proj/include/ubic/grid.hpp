#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <Eigen/Core>

#include "ubic/random.hpp"

namespace ubic {

/// Uniformly spaced sample locations min, min + h, ..., max.
struct Axis {
  double min = 0.0;
  double max = 1.0;
  std::size_t count = 2;

  double spacing() const { return (max - min) / static_cast<double>(count - 1); }
  double extent() const { return max - min; }
  double at(std::size_t i) const { return min + static_cast<double>(i) * spacing(); }

  /// Throws InvalidArgument unless max > min, count >= 2 and the spacing is positive.
  void validate() const;

  bool operator==(const Axis&) const = default;
};

/// Real state sampled on a space-time grid. Rows index space, columns time.
class Field {
 public:
  Field(Axis x, Axis t, Eigen::MatrixXd values);

  const Axis& x() const { return x_; }
  const Axis& t() const { return t_; }
  const Eigen::MatrixXd& values() const { return values_; }
  std::size_t nx() const { return x_.count; }
  std::size_t nt() const { return t_.count; }

  /// Same axes, new values (validated).
  Field with_values(Eigen::MatrixXd values) const { return Field(x_, t_, std::move(values)); }

 private:
  Axis x_;
  Axis t_;
  Eigen::MatrixXd values_;
};

struct NoiseSpec {
  double epsilon_percent = 0.0;
  std::uint64_t seed = 0;
};

/// Population (divide-by-N) standard deviation over all entries.
double population_sd(const Eigen::MatrixXd& values);

/// Adds i.i.d. (epsilon * sd / 100) N(0, 1) noise, sd taken over the whole field.
/// Draws are taken in x-major order from Rng seeded with spec.seed.
Field add_noise(const Field& field, const NoiseSpec& spec);

/// Binary field file: one JSON header line followed by nx*nt little-endian
/// doubles in x-major order (all time samples of x_0, then x_1, ...).
void write_field(const Field& field, const std::filesystem::path& path);
Field read_field(const std::filesystem::path& path);

/// One CSV row per spatial index.
void write_field_csv(const Field& field, const std::filesystem::path& path);

namespace detail {
// Shared by the field and library file formats.
void write_f64le(std::ostream& out, const double* data, std::size_t n);
void read_f64le(std::istream& in, double* data, std::size_t n);
}  // namespace detail

}  // namespace ubic
