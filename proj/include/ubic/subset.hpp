#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "ubic/weaklib.hpp"

namespace ubic {

/// Least-squares model restricted to a sorted support of library columns.
struct SubsetModel {
  std::vector<std::size_t> support;
  Eigen::VectorXd coefficients;  // aligned with support
  double sse = 0.0;              // |q0 - Phi_S xi|^2
  bool rank_deficient = false;   // minimum-norm fallback was used

  std::size_t support_size() const { return support.size(); }
};

enum class Solver { Exhaustive, Frols, Refine };

Solver parse_solver(const std::string& name);
std::string to_string(Solver solver);

struct SubsetSweep {
  std::vector<SubsetModel> models;  // support sizes 1 .. max_s
  Solver solver = Solver::Exhaustive;
};

/// OLS on the given columns (QR with column pivoting; complete orthogonal
/// decomposition when the columns are rank deficient).
SubsetModel fit_support(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                        std::vector<std::size_t> support);

inline constexpr double kDefaultSubsetBudget = 1e6;

/// Globally SSE-minimal support of size s. Supports are visited in
/// lexicographic order and only a strictly smaller SSE replaces the incumbent.
/// `candidates` restricts the search to a pool (all columns when empty).
SubsetModel exhaustive(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0, std::size_t s,
                       double budget = kDefaultSubsetBudget,
                       const std::vector<std::size_t>& candidates = {});
SubsetModel exhaustive(const WeakLibrary& library, std::size_t s,
                       double budget = kDefaultSubsetBudget);

/// Order in which forward regression with orthogonal least squares picks the
/// columns: the largest error-reduction ratio (q0 . w)^2 / (|w|^2 |q0|^2)
/// after Gram-Schmidt against the columns already chosen. Columns left with
/// (numerically) zero norm are skipped.
std::vector<std::size_t> frols_order(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0,
                                     std::size_t max_s);

/// Prefix models of the FROLS order, refitted by OLS.
SubsetSweep frols(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0, std::size_t max_s);
SubsetSweep frols(const WeakLibrary& library, std::size_t max_s);

/// Models for s = 1 .. max_s. Refine runs exhaustive search over the union of
/// the FROLS prefixes.
SubsetSweep sweep(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0, std::size_t max_s,
                  Solver solver, double budget = kDefaultSubsetBudget);
SubsetSweep sweep(const WeakLibrary& library, std::size_t max_s, Solver solver,
                  double budget = kDefaultSubsetBudget);

/// Coefficients scattered into a length-n vector (zeros off the support).
Eigen::VectorXd dense_coefficients(const SubsetModel& model, std::size_t n);

}  // namespace ubic
