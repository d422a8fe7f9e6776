#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Core>

#include "ubic/grid.hpp"

namespace test {

/// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ubic_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline ubic::Field random_field(std::size_t nx, std::size_t nt, std::uint64_t seed) {
  return ubic::Field({0.0, 1.0, nx}, {0.0, 2.0, nt},
                     gaussian_matrix(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(nt), seed));
}

/// A travelling bump on [-8, 8] x [0, 10]: smooth, with nonzero spread.
inline ubic::Field smooth_field(std::size_t nx, std::size_t nt) {
  const ubic::Axis x{-8.0, 8.0, nx}, t{0.0, 10.0, nt};
  Eigen::MatrixXd v(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(nt));
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < nt; ++j) {
      const double xi = x.at(i), tj = t.at(j);
      v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::exp(-(xi + 2.0 - 0.3 * tj) * (xi + 2.0 - 0.3 * tj) / (1.0 + 0.1 * tj));
    }
  return ubic::Field(x, t, v);
}

template <class F>
ubic::Field sample(const ubic::Axis& x, const ubic::Axis& t, F&& f) {
  Eigen::MatrixXd v(static_cast<Eigen::Index>(x.count), static_cast<Eigen::Index>(t.count));
  for (std::size_t i = 0; i < x.count; ++i)
    for (std::size_t j = 0; j < t.count; ++j)
      v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f(x.at(i), t.at(j));
  return ubic::Field(x, t, v);
}

inline double rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / b.norm();
}

}  // namespace test
