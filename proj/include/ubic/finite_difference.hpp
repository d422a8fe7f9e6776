#pragma once

#include <vector>

#include <Eigen/Core>

namespace ubic {

/// Fornberg's finite-difference weights for the `order`-th derivative at x0
/// from values at `nodes`.
Eigen::VectorXd fd_weights(double x0, const std::vector<double>& nodes, int order);

/// order-th derivative along axis 0 (down each column) with spacing h.
/// Centered second-order stencils in the interior; shifted
/// (order + 2)-point one-sided stencils where the centered one does not fit.
Eigen::MatrixXd differentiate_rows(const Eigen::MatrixXd& values, int order, double h);

}  // namespace ubic
