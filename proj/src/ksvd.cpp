#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "ubic/denoise.hpp"
#include "ubic/error.hpp"

namespace ubic {
namespace {

struct LeadingPair {
  double sigma = 0.0;
  Eigen::VectorXd left;
  Eigen::VectorXd right;
};

// Leading singular triple from whichever Gram matrix is smaller.
LeadingPair leading_singular_pair(const Eigen::MatrixXd& e) {
  LeadingPair out;
  if (e.cols() <= e.rows()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(e.transpose() * e);
    const Eigen::Index top = e.cols() - 1;
    out.sigma = std::sqrt(std::max(eig.eigenvalues()[top], 0.0));
    out.right = eig.eigenvectors().col(top);
    out.left = e * out.right;
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(e * e.transpose());
    const Eigen::Index top = e.rows() - 1;
    out.sigma = std::sqrt(std::max(eig.eigenvalues()[top], 0.0));
    out.left = eig.eigenvectors().col(top);
    out.right = e.transpose() * out.left;
  }
  // Re-derive the pair from one power step so that |left| = |right| = 1 and
  // left^T e right = sigma to working precision.
  out.left.normalize();
  out.right = e.transpose() * out.left;
  out.sigma = out.right.norm();
  if (out.sigma > 0.0) out.right /= out.sigma;
  return out;
}

double column_cost(const Eigen::VectorXd& residual, const Eigen::VectorXd& code, double rho) {
  return residual.squaredNorm() + rho * code.squaredNorm();
}

}  // namespace

double ksvd_objective(const Eigen::MatrixXd& signals, const Dictionary& dict, double rho) {
  return (signals - dict.atoms * dict.code).squaredNorm() + rho * dict.code.squaredNorm();
}

Dictionary train_rksvd(const Eigen::MatrixXd& signals, const KsvdOptions& options,
                       KsvdTrace* trace) {
  const Eigen::Index dim = signals.rows();
  const Eigen::Index n_signals = signals.cols();
  if (dim == 0 || n_signals == 0) throw InvalidArgument("no signals to train on");
  if (options.rho < 0.0) throw InvalidArgument("rho must be non-negative");
  if (options.iterations < 0) throw InvalidArgument("iteration count must be non-negative");
  if (options.train_sparsity == 0) throw InvalidArgument("train sparsity must be positive");

  Eigen::Index n_atoms = options.atoms ? static_cast<Eigen::Index>(options.atoms) : 2 * dim;
  n_atoms = std::min(n_atoms, n_signals);
  const auto sparsity = std::min<std::size_t>(options.train_sparsity, static_cast<std::size_t>(n_atoms));
  const double rho = options.rho;

  // Initial atoms: distinct randomly chosen signals, normalized.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n_signals));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(options.seed);
  std::shuffle(order.begin(), order.end(), rng);

  Dictionary dict;
  dict.atoms.resize(dim, n_atoms);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j = 0; j < n_atoms; ++j) {
    Eigen::VectorXd d = signals.col(order[static_cast<std::size_t>(j)]);
    if (d.norm() == 0.0) {
      for (Eigen::Index r = 0; r < dim; ++r) d[r] = normal(rng);
    }
    dict.atoms.col(j) = d.normalized();
  }
  dict.code = Eigen::MatrixXd::Zero(n_atoms, n_signals);
  Eigen::MatrixXd residual = signals;

  double objective = signals.squaredNorm();
  if (trace) trace->objective.clear();

  for (int iter = 0; iter < options.iterations; ++iter) {
    // (a) Sparse coding. A column keeps its previous code unless the new one
    // lowers that column's regularized cost.
    const SparseCode coded = omp(dict.atoms, signals, sparsity, rho);
    for (Eigen::Index l = 0; l < n_signals; ++l) {
      Eigen::VectorXd fresh_residual = signals.col(l);
      for (Eigen::Index j = 0; j < n_atoms; ++j)
        if (const double a = coded.coefficients(j, l); a != 0.0) fresh_residual -= dict.atoms.col(j) * a;
      if (column_cost(fresh_residual, coded.coefficients.col(l), rho) <
          column_cost(residual.col(l), dict.code.col(l), rho)) {
        dict.code.col(l) = coded.coefficients.col(l);
        residual.col(l) = fresh_residual;
      }
    }

    // (b) Atom-by-atom regularized rank-1 updates.
    std::vector<char> reseed_taken(static_cast<std::size_t>(n_signals), 0);
    Eigen::VectorXd residual_energy = residual.colwise().squaredNorm().transpose();
    for (Eigen::Index j = 0; j < n_atoms; ++j) {
      std::vector<Eigen::Index> users;
      for (Eigen::Index l = 0; l < n_signals; ++l)
        if (dict.code(j, l) != 0.0) users.push_back(l);

      if (users.empty()) {
        Eigen::Index worst = -1;
        double worst_err = 0.0;
        for (Eigen::Index l = 0; l < n_signals; ++l) {
          if (reseed_taken[static_cast<std::size_t>(l)]) continue;
          const double err = residual_energy[l];
          if (err > worst_err) {
            worst_err = err;
            worst = l;
          }
        }
        if (worst >= 0) {
          dict.atoms.col(j) = residual.col(worst).normalized();
          reseed_taken[static_cast<std::size_t>(worst)] = 1;
          if (trace) ++trace->reseeded_atoms;
        }
        continue;
      }

      const auto n_users = static_cast<Eigen::Index>(users.size());
      Eigen::MatrixXd e(dim, n_users);
      for (Eigen::Index m = 0; m < n_users; ++m) {
        const Eigen::Index l = users[static_cast<std::size_t>(m)];
        e.col(m) = residual.col(l) + dict.atoms.col(j) * dict.code(j, l);
      }
      const LeadingPair pair = leading_singular_pair(e);
      if (pair.sigma == 0.0) {
        for (Eigen::Index m = 0; m < n_users; ++m) {
          const Eigen::Index l = users[static_cast<std::size_t>(m)];
          dict.code(j, l) = 0.0;
          residual.col(l) = e.col(m);
          residual_energy[l] = residual.col(l).squaredNorm();
        }
        continue;
      }
      dict.atoms.col(j) = pair.left;
      const Eigen::VectorXd row = pair.right * (pair.sigma / (1.0 + rho));
      for (Eigen::Index m = 0; m < n_users; ++m) {
        const Eigen::Index l = users[static_cast<std::size_t>(m)];
        dict.code(j, l) = row[m];
        residual.col(l) = e.col(m) - pair.left * row[m];
        residual_energy[l] = residual.col(l).squaredNorm();
      }
    }

    objective = residual.squaredNorm() + rho * dict.code.squaredNorm();
    if (trace) trace->objective.push_back(objective);
  }
  return dict;
}

Field rksvd_denoise(const Field& field, const KsvdOptions& options, KsvdTrace* trace) {
  const PatchStack stack = to_patches(field, options.patch, options.stride);
  const Dictionary dict = train_rksvd(stack.data, options, trace);
  std::size_t final_sparsity =
      options.final_sparsity ? options.final_sparsity : (options.patch * options.patch) / 10;
  final_sparsity = std::clamp<std::size_t>(final_sparsity, 1, static_cast<std::size_t>(dict.atoms.cols()));
  const SparseCode code = omp(dict.atoms, stack.data, final_sparsity, 0.0);
  PatchStack rebuilt = stack;
  rebuilt.data = dict.atoms * code.coefficients;
  return from_patches(rebuilt, field.x(), field.t());
}

}  // namespace ubic
