#include <Eigen/SVD>

#include "ubic/denoise.hpp"
#include "ubic/error.hpp"

namespace ubic {

Eigen::MatrixXd svd_truncate(const Eigen::MatrixXd& matrix, std::size_t rank) {
  const auto max_rank = static_cast<std::size_t>(std::min(matrix.rows(), matrix.cols()));
  if (rank < 1 || rank > max_rank) throw InvalidArgument("rank must lie in [1, min(rows, cols)]");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto r = static_cast<Eigen::Index>(rank);
  return svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal() *
         svd.matrixV().leftCols(r).transpose();
}

Field svd_truncate(const Field& field, std::size_t rank) {
  return field.with_values(svd_truncate(field.values(), rank));
}

}  // namespace ubic
