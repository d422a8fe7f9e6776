#include "ubic/subset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/QR>

#include "ubic/error.hpp"
#include "ubic/parallel.hpp"

namespace ubic {
namespace {

double binomial_count(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Advances idx (strictly increasing, values < n) to the next combination.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

double subset_sse(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                  const std::vector<std::size_t>& support) {
  Eigen::MatrixXd sub(phi.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t m = 0; m < support.size(); ++m)
    sub.col(static_cast<Eigen::Index>(m)) = phi.col(static_cast<Eigen::Index>(support[m]));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
  Eigen::VectorXd coef;
  if (qr.rank() < sub.cols())
    coef = sub.completeOrthogonalDecomposition().solve(q0);
  else
    coef = qr.solve(q0);
  return (q0 - sub * coef).squaredNorm();
}

}  // namespace

Solver parse_solver(const std::string& name) {
  if (name == "exhaustive") return Solver::Exhaustive;
  if (name == "frols") return Solver::Frols;
  if (name == "refine") return Solver::Refine;
  throw InvalidArgument("unknown solver '" + name + "' (expected exhaustive|frols|refine)");
}

std::string to_string(Solver solver) {
  switch (solver) {
    case Solver::Exhaustive: return "exhaustive";
    case Solver::Frols: return "frols";
    case Solver::Refine: return "refine";
  }
  return "unknown";
}

SubsetModel fit_support(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                        std::vector<std::size_t> support) {
  if (phi.rows() != q0.size()) throw InvalidArgument("library and target lengths differ");
  std::sort(support.begin(), support.end());
  if (support.empty()) throw InvalidArgument("support must not be empty");
  if (std::adjacent_find(support.begin(), support.end()) != support.end())
    throw InvalidArgument("support contains duplicates");
  if (support.back() >= static_cast<std::size_t>(phi.cols())) throw InvalidArgument("support index out of range");

  Eigen::MatrixXd sub(phi.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t m = 0; m < support.size(); ++m)
    sub.col(static_cast<Eigen::Index>(m)) = phi.col(static_cast<Eigen::Index>(support[m]));

  SubsetModel model;
  model.support = std::move(support);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sub);
  if (qr.rank() < sub.cols()) {
    model.coefficients = sub.completeOrthogonalDecomposition().solve(q0);
    model.rank_deficient = true;
  } else {
    model.coefficients = qr.solve(q0);
  }
  model.sse = (q0 - sub * model.coefficients).squaredNorm();
  return model;
}

SubsetModel exhaustive(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0, std::size_t s,
                       double budget, const std::vector<std::size_t>& candidates) {
  std::vector<std::size_t> pool = candidates;
  if (pool.empty()) {
    pool.resize(static_cast<std::size_t>(phi.cols()));
    std::iota(pool.begin(), pool.end(), std::size_t{0});
  }
  std::sort(pool.begin(), pool.end());
  const std::size_t n = pool.size();
  if (s < 1 || s > n) throw InvalidArgument("support size must lie in [1, number of candidates]");
  if (binomial_count(n, s) > budget)
    throw InvalidArgument("exhaustive search over C(" + std::to_string(n) + ", " + std::to_string(s) +
                          ") subsets exceeds the budget; use frols");

  std::vector<std::vector<std::size_t>> combos;
  std::vector<std::size_t> idx(s);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  do combos.push_back(idx);
  while (next_combination(idx, n));

  std::vector<double> sse(combos.size());
  parallel_for(combos.size(), [&](std::size_t c) {
    std::vector<std::size_t> support(s);
    for (std::size_t m = 0; m < s; ++m) support[m] = pool[combos[c][m]];
    sse[c] = subset_sse(phi, q0, support);
  });

  std::size_t best = 0;
  for (std::size_t c = 1; c < combos.size(); ++c)
    if (sse[c] < sse[best]) best = c;
  std::vector<std::size_t> support(s);
  for (std::size_t m = 0; m < s; ++m) support[m] = pool[combos[best][m]];
  return fit_support(phi, q0, std::move(support));
}

SubsetModel exhaustive(const WeakLibrary& library, std::size_t s, double budget) {
  return exhaustive(library.phi, library.q0, s, budget);
}

std::vector<std::size_t> frols_order(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                                     std::size_t max_s) {
  const auto n = static_cast<std::size_t>(phi.cols());
  if (max_s > n) throw InvalidArgument("max support exceeds the number of candidates");
  const double target_energy = q0.squaredNorm();
  std::vector<std::size_t> order;
  std::vector<Eigen::VectorXd> basis;
  std::vector<char> taken(n, 0);
  while (order.size() < max_s) {
    double best_err = -1.0;
    std::size_t best = n;
    Eigen::VectorXd best_w;
    for (std::size_t j = 0; j < n; ++j) {
      if (taken[j]) continue;
      const Eigen::VectorXd col = phi.col(static_cast<Eigen::Index>(j));
      Eigen::VectorXd w = col;
      for (const auto& b : basis) w -= (b.dot(w) / b.squaredNorm()) * b;
      const double ww = w.squaredNorm();
      if (ww <= 1e-20 * std::max(col.squaredNorm(), std::numeric_limits<double>::min())) continue;
      const double err = target_energy > 0.0 ? std::pow(q0.dot(w), 2) / (ww * target_energy) : 0.0;
      if (err > best_err) {
        best_err = err;
        best = j;
        best_w = std::move(w);
      }
    }
    if (best == n) break;  // every remaining column is degenerate
    taken[best] = 1;
    order.push_back(best);
    basis.push_back(std::move(best_w));
  }
  return order;
}

SubsetSweep frols(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0, std::size_t max_s) {
  const std::vector<std::size_t> order = frols_order(phi, q0, max_s);
  SubsetSweep out;
  out.solver = Solver::Frols;
  for (std::size_t s = 1; s <= order.size(); ++s)
    out.models.push_back(fit_support(phi, q0, {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s)}));
  return out;
}

SubsetSweep frols(const WeakLibrary& library, std::size_t max_s) {
  return frols(library.phi, library.q0, max_s);
}

SubsetSweep sweep(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0, std::size_t max_s,
                  Solver solver, double budget) {
  if (max_s < 1 || max_s > static_cast<std::size_t>(phi.cols()))
    throw InvalidArgument("max support must lie in [1, number of candidates]");
  switch (solver) {
    case Solver::Frols:
      return frols(phi, q0, max_s);
    case Solver::Exhaustive: {
      SubsetSweep out;
      out.solver = solver;
      for (std::size_t s = 1; s <= max_s; ++s) out.models.push_back(exhaustive(phi, q0, s, budget));
      return out;
    }
    case Solver::Refine: {
      const std::vector<std::size_t> pool = frols_order(phi, q0, max_s);
      SubsetSweep out;
      out.solver = solver;
      for (std::size_t s = 1; s <= pool.size(); ++s)
        out.models.push_back(exhaustive(phi, q0, s, budget, pool));
      return out;
    }
  }
  throw InvalidArgument("unknown solver");
}

SubsetSweep sweep(const WeakLibrary& library, std::size_t max_s, Solver solver, double budget) {
  return sweep(library.phi, library.q0, max_s, solver, budget);
}

Eigen::VectorXd dense_coefficients(const SubsetModel& model, std::size_t n) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t m = 0; m < model.support.size(); ++m)
    out[static_cast<Eigen::Index>(model.support[m])] = model.coefficients[static_cast<Eigen::Index>(m)];
  return out;
}

}  // namespace ubic
