#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "ubic/denoise.hpp"
#include "ubic/error.hpp"
#include "ubic/parallel.hpp"

namespace ubic {

SparseCode omp(const Eigen::MatrixXd& atoms, const Eigen::MatrixXd& signals,
               std::size_t sparsity, double ridge) {
  if (atoms.rows() != signals.rows()) throw InvalidArgument("atom and signal dimensions differ");
  if (sparsity > static_cast<std::size_t>(atoms.cols()))
    throw InvalidArgument("sparsity exceeds the number of atoms");
  if (ridge < 0.0) throw InvalidArgument("ridge must be non-negative");

  const Eigen::Index n_atoms = atoms.cols();
  const Eigen::MatrixXd correlation = atoms.transpose() * signals;
  // One-atom codes only need the correlations and the unit diagonal.
  const Eigen::MatrixXd gram = sparsity > 1 ? Eigen::MatrixXd(atoms.transpose() * atoms) : Eigen::MatrixXd();

  SparseCode result;
  result.coefficients = Eigen::MatrixXd::Zero(n_atoms, signals.cols());
  std::vector<char> fallback(static_cast<std::size_t>(signals.cols()), 0);

  parallel_for(static_cast<std::size_t>(signals.cols()), [&](std::size_t col) {
    const auto c = static_cast<Eigen::Index>(col);
    const Eigen::VectorXd alpha = correlation.col(c);
    const double energy = signals.col(c).squaredNorm();
    if (energy == 0.0) return;

    std::vector<Eigen::Index> support;
    std::vector<char> used(static_cast<std::size_t>(n_atoms), 0);
    Eigen::VectorXd x;
    bool degenerate = false;

    for (std::size_t step = 0; step < sparsity; ++step) {
      Eigen::VectorXd residual_corr = alpha;
      for (std::size_t m = 0; m < support.size(); ++m)
        residual_corr -= gram.col(support[m]) * x[static_cast<Eigen::Index>(m)];

      Eigen::Index best = -1;
      double best_abs = 0.0;
      for (Eigen::Index j = 0; j < n_atoms; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double a = std::abs(residual_corr[j]);
        if (a > best_abs) {
          best_abs = a;
          best = j;
        }
      }
      if (best < 0 || best_abs <= 1e-14 * std::sqrt(energy)) break;
      support.push_back(best);
      used[static_cast<std::size_t>(best)] = 1;

      const auto k = static_cast<Eigen::Index>(support.size());
      Eigen::MatrixXd g(k, k);
      Eigen::VectorXd rhs(k);
      for (Eigen::Index a = 0; a < k; ++a) {
        rhs[a] = alpha[support[static_cast<std::size_t>(a)]];
        for (Eigen::Index b = 0; b < k; ++b)
          g(a, b) = gram.size() ? gram(support[static_cast<std::size_t>(a)], support[static_cast<std::size_t>(b)])
                                : atoms.col(support[static_cast<std::size_t>(a)]).squaredNorm();
      }
      g.diagonal().array() += ridge;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
      const auto d = ldlt.vectorD().cwiseAbs();
      if (ldlt.info() != Eigen::Success || d.minCoeff() <= 1e-12 * d.maxCoeff()) {
        Eigen::MatrixXd sub(atoms.rows(), k);
        for (Eigen::Index a = 0; a < k; ++a) sub.col(a) = atoms.col(support[static_cast<std::size_t>(a)]);
        x = sub.completeOrthogonalDecomposition().solve(signals.col(c));
        degenerate = true;
      } else {
        x = ldlt.solve(rhs);
      }

      const double residual = energy - 2.0 * x.dot(rhs) + x.dot((g * x));
      if (ridge == 0.0 && residual <= 1e-28 * energy) break;
    }
    for (std::size_t m = 0; m < support.size(); ++m)
      result.coefficients(support[m], c) = x[static_cast<Eigen::Index>(m)];
    fallback[col] = degenerate ? 1 : 0;
  });
  for (char f : fallback) result.rank_deficient += static_cast<std::size_t>(f);
  return result;
}

}  // namespace ubic
