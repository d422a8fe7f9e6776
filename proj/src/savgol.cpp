#include <Eigen/QR>

#include "ubic/denoise.hpp"
#include "ubic/error.hpp"

namespace ubic {
namespace {

void check_axis(std::size_t window, int order) {
  if (window < 3 || window % 2 == 0) throw InvalidArgument("savgol window must be odd and >= 3");
  if (order < 0 || static_cast<std::size_t>(order) >= window)
    throw InvalidArgument("savgol polyorder must satisfy 0 <= order < window");
}

// Smooths every column of `values` (axis 0) with shifted windows at the edges.
Eigen::MatrixXd smooth_rows(const Eigen::MatrixXd& values, std::size_t window, int order) {
  const auto n = static_cast<std::size_t>(values.rows());
  if (window > n) throw InvalidArgument("savgol window larger than the grid");
  const std::size_t half = window / 2;
  std::vector<Eigen::VectorXd> weights(window);
  for (std::size_t r = 0; r < window; ++r) weights[r] = savgol_weights(window, order, r);

  Eigen::MatrixXd out(values.rows(), values.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t start = std::min(i > half ? i - half : 0, n - window);
    const Eigen::VectorXd& w = weights[i - start];
    out.row(static_cast<Eigen::Index>(i)) =
        w.transpose() * values.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(window));
  }
  return out;
}

}  // namespace

void SavgolSpec::validate() const {
  check_axis(window_x, order_x);
  check_axis(window_t, order_t);
}

Eigen::VectorXd savgol_weights(std::size_t window, int order, std::size_t position) {
  check_axis(window, order);
  if (position >= window) throw InvalidArgument("evaluation point outside the window");
  const double center = 0.5 * static_cast<double>(window - 1);
  Eigen::MatrixXd vander(window, order + 1);
  for (std::size_t r = 0; r < window; ++r) {
    const double z = static_cast<double>(r) - center;
    double power = 1.0;
    for (int k = 0; k <= order; ++k) {
      vander(static_cast<Eigen::Index>(r), k) = power;
      power *= z;
    }
  }
  // weights^T = e(position)^T V (V^T V)^{-1} V^T, i.e. the hat-matrix row.
  const Eigen::MatrixXd pinv = vander.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(window, window));
  return (vander.row(static_cast<Eigen::Index>(position)) * pinv).transpose();
}

// The tensor-product polynomial basis over a rectangular stencil makes the 2D
// least-squares projection the product of the two 1D projections.
Eigen::MatrixXd savgol2d(const Eigen::MatrixXd& values, const SavgolSpec& spec) {
  spec.validate();
  const Eigen::MatrixXd along_x = smooth_rows(values, spec.window_x, spec.order_x);
  return smooth_rows(along_x.transpose(), spec.window_t, spec.order_t).transpose();
}

Field savgol2d(const Field& field, const SavgolSpec& spec) {
  return field.with_values(savgol2d(field.values(), spec));
}

}  // namespace ubic
