#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "ubic/grid.hpp"

namespace ubic {

// ---------------------------------------------------------------------------
// Patch stacks

/// Flattened p x p patches of a mean-removed field, one per column.
/// Patch pixel (a, b) (a along x, b along t) is stored at row a + p * b.
struct PatchStack {
  std::size_t patch_size = 0;
  Eigen::MatrixXd data;
  std::vector<std::pair<std::size_t, std::size_t>> origins;
  double removed_mean = 0.0;
  std::size_t nx = 0;
  std::size_t nt = 0;
};

/// Patch origins along an axis of length n: 0, stride, 2 * stride, ... with a
/// final patch flush to the far edge when the tiling does not end exactly there.
std::vector<std::size_t> patch_offsets(std::size_t n, std::size_t patch, std::size_t stride);

/// Non-overlapping tiling by default (stride = p). A smaller stride gives
/// overlapping patches, averaged on reconstruction.
PatchStack to_patches(const Field& field, std::size_t p, std::size_t stride = 0);

/// Rebuilds a field from (possibly modified) patch columns, averaging pixels
/// covered by more than one patch and restoring the removed mean.
Field from_patches(const PatchStack& stack, const Axis& x, const Axis& t);

// ---------------------------------------------------------------------------
// Orthogonal matching pursuit

struct SparseCode {
  Eigen::MatrixXd coefficients;        // atoms x signals
  std::size_t rank_deficient = 0;      // columns solved by the minimum-norm fallback
};

/// Greedy OMP: adds the atom most correlated with the current residual, then
/// refits every selected coefficient. With ridge > 0 the refit minimizes
/// |s - D_S x|^2 + ridge |x|^2 instead of the plain least-squares residual.
/// Atoms must have unit norm; sparsity must not exceed the atom count.
SparseCode omp(const Eigen::MatrixXd& atoms, const Eigen::MatrixXd& signals,
               std::size_t sparsity, double ridge = 0.0);

// ---------------------------------------------------------------------------
// Regularized K-SVD

struct KsvdOptions {
  std::size_t patch = 8;
  std::size_t stride = 0;            // 0: non-overlapping (stride = patch)
  std::size_t atoms = 0;             // 0: 2 p^2, capped at the number of patches
  double rho = 0.05;
  std::size_t train_sparsity = 1;
  std::size_t final_sparsity = 0;    // 0: floor(p^2 / 10)
  int iterations = 30;
  std::uint64_t seed = 0;
};

struct Dictionary {
  Eigen::MatrixXd atoms;  // p^2 x c, unit columns
  Eigen::MatrixXd code;   // c x f
};

struct KsvdTrace {
  std::vector<double> objective;   // |S - DA|_F^2 + rho |A|_F^2 after each iteration
  std::size_t reseeded_atoms = 0;
};

/// Objective minimized by the regularized dictionary update.
double ksvd_objective(const Eigen::MatrixXd& signals, const Dictionary& dict, double rho);

/// Alternates ridge-refitted OMP coding and per-atom rank-1 updates; each
/// update takes the leading singular pair (sigma, u, v) of the restricted
/// residual and sets d = u, a = sigma v / (1 + rho). Atoms with no users are
/// re-seeded from the worst-represented signal.
Dictionary train_rksvd(const Eigen::MatrixXd& signals, const KsvdOptions& options,
                       KsvdTrace* trace = nullptr);

/// Trains on the patch stack, re-encodes with the final sparsity using plain
/// OMP and rebuilds the field from the reconstructed patches.
Field rksvd_denoise(const Field& field, const KsvdOptions& options, KsvdTrace* trace = nullptr);

// ---------------------------------------------------------------------------
// Savitzky-Golay

struct SavgolSpec {
  std::size_t window_x = 11;
  std::size_t window_t = 11;
  int order_x = 2;
  int order_t = 2;

  void validate() const;
};

/// 1D smoothing weights evaluating the degree-`order` least-squares fit over a
/// `window`-point stencil at stencil position `position`.
Eigen::VectorXd savgol_weights(std::size_t window, int order, std::size_t position);

/// Value of the local tensor-product polynomial fit (degree order_x in x,
/// order_t in t) at every grid point. Near edges the window is shifted inward
/// so polynomials of the fitted degree are reproduced everywhere.
Eigen::MatrixXd savgol2d(const Eigen::MatrixXd& values, const SavgolSpec& spec);
Field savgol2d(const Field& field, const SavgolSpec& spec);

// ---------------------------------------------------------------------------
// Truncated SVD

/// Best rank-r approximation in the Frobenius norm.
Eigen::MatrixXd svd_truncate(const Eigen::MatrixXd& matrix, std::size_t rank);
Field svd_truncate(const Field& field, std::size_t rank);

}  // namespace ubic
