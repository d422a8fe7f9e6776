#include "ubic/finite_difference.hpp"

#include <algorithm>

#include "ubic/error.hpp"

namespace ubic {

Eigen::VectorXd fd_weights(double x0, const std::vector<double>& nodes, int order) {
  const int n = static_cast<int>(nodes.size());
  if (order < 0 || n <= order) throw InvalidArgument("stencil too small for derivative order");
  // c(j, k): weight of node j for derivative k, built one node at a time.
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, order + 1);
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[static_cast<std::size_t>(i)] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c.col(order);
}

Eigen::MatrixXd differentiate_rows(const Eigen::MatrixXd& values, int order, double h) {
  if (order == 0) return values;
  const Eigen::Index n = values.rows();
  const Eigen::Index half = (order + 1) / 2;
  const Eigen::Index edge_width = order + 2;
  if (n < edge_width) throw InvalidArgument("too few samples for the requested derivative");

  auto stencil = [&](Eigen::Index start, Eigen::Index width, Eigen::Index at) {
    std::vector<double> nodes(static_cast<std::size_t>(width));
    for (Eigen::Index m = 0; m < width; ++m) nodes[static_cast<std::size_t>(m)] = static_cast<double>(start + m);
    Eigen::VectorXd w = fd_weights(static_cast<double>(at), nodes, order);
    for (int k = 0; k < order; ++k) w /= h;
    return w;
  };

  const Eigen::VectorXd centered = stencil(-half, 2 * half + 1, 0);
  Eigen::MatrixXd out(n, values.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i - half >= 0 && i + half < n) {
      out.row(i) = centered.transpose() * values.middleRows(i - half, 2 * half + 1);
    } else {
      const Eigen::Index start = std::clamp<Eigen::Index>(i - edge_width / 2, 0, n - edge_width);
      const Eigen::VectorXd w = stencil(start, edge_width, i);
      out.row(i) = w.transpose() * values.middleRows(start, edge_width);
    }
  }
  return out;
}

}  // namespace ubic
