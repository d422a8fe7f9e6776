#include <doctest.h>

#include <Eigen/QR>

#include "helpers.hpp"
#include "ubic/error.hpp"
#include "ubic/subset.hpp"

using namespace ubic;

namespace {

// Minimal SSE over every size-s support, by independent brute force.
double brute_force_sse(const Eigen::MatrixXd& phi, const Eigen::VectorXd& q0, std::size_t s,
                       std::vector<std::size_t>* best_support = nullptr) {
  const auto n = static_cast<std::size_t>(phi.cols());
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != s) continue;
    Eigen::MatrixXd sub(phi.rows(), static_cast<Eigen::Index>(s));
    std::vector<std::size_t> support;
    for (std::size_t j = 0; j < n; ++j)
      if (mask & (1u << j)) {
        sub.col(static_cast<Eigen::Index>(support.size())) = phi.col(static_cast<Eigen::Index>(j));
        support.push_back(j);
      }
    const Eigen::VectorXd xi = sub.householderQr().solve(q0);
    const double sse = (q0 - sub * xi).squaredNorm();
    if (sse < best) {
      best = sse;
      if (best_support) *best_support = support;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("exhaustive search matches brute force on random libraries") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::MatrixXd phi = test::gaussian_matrix(60, 8, seed);
    const Eigen::VectorXd q0 = test::gaussian_matrix(60, 1, 100 + seed);
    for (std::size_t s = 1; s <= 8; ++s) {
      const SubsetModel model = exhaustive(phi, q0, s);
      const double oracle = brute_force_sse(phi, q0, s);
      CHECK(model.sse == doctest::Approx(oracle).epsilon(1e-10));
      CHECK(model.support_size() == s);
      CHECK(std::is_sorted(model.support.begin(), model.support.end()));
    }
  }
}

TEST_CASE("planted two-term model is recovered") {
  Eigen::MatrixXd phi = test::gaussian_matrix(200, 8, 42);
  const Eigen::VectorXd noise = 1e-3 * test::gaussian_matrix(200, 1, 43);
  const Eigen::VectorXd q0 = 0.7 * phi.col(4) - 1.3 * phi.col(5) + noise;
  const SubsetModel model = exhaustive(phi, q0, 2);
  REQUIRE(model.support == std::vector<std::size_t>{4, 5});
  CHECK(model.coefficients[0] == doctest::Approx(0.7).epsilon(1e-2));
  CHECK(model.coefficients[1] == doctest::Approx(-1.3).epsilon(1e-2));
  for (Solver solver : {Solver::Exhaustive, Solver::Frols, Solver::Refine})
    CHECK(sweep(phi, q0, 4, solver).models[1].support == std::vector<std::size_t>{4, 5});
}

TEST_CASE("FROLS equals exhaustive search on an orthogonal design") {
  const Eigen::MatrixXd q = test::gaussian_matrix(80, 6, 7).householderQr().householderQ() *
                            Eigen::MatrixXd::Identity(80, 6);
  const Eigen::VectorXd q0 = test::gaussian_matrix(80, 1, 8);
  const SubsetSweep greedy = frols(q, q0, 6);
  for (std::size_t s = 1; s <= 6; ++s) {
    const SubsetModel best = exhaustive(q, q0, s);
    auto greedy_support = greedy.models[s - 1].support;
    CHECK(greedy_support == best.support);
    CHECK(greedy.models[s - 1].sse == doctest::Approx(best.sse).epsilon(1e-10));
  }
}

TEST_CASE("sweep invariants: SSE non-increasing, normal equations, solver ordering") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd phi = test::gaussian_matrix(50, 9, 300 + seed);
    const Eigen::VectorXd q0 = phi.col(1) - 0.5 * phi.col(6) + 0.3 * test::gaussian_matrix(50, 1, 400 + seed);
    const SubsetSweep ex = sweep(phi, q0, 9, Solver::Exhaustive);
    const SubsetSweep fr = sweep(phi, q0, 9, Solver::Frols);
    const SubsetSweep rf = sweep(phi, q0, 9, Solver::Refine);
    REQUIRE(ex.models.size() == 9);
    for (std::size_t k = 0; k < 9; ++k) {
      if (k > 0) CHECK(ex.models[k].sse <= ex.models[k - 1].sse * (1 + 1e-12));
      CHECK(ex.models[k].sse <= fr.models[k].sse * (1 + 1e-12));
      CHECK(ex.models[k].sse <= rf.models[k].sse * (1 + 1e-12));
      CHECK(rf.models[k].sse <= fr.models[k].sse * (1 + 1e-12));
      for (const auto* m : {&ex.models[k], &fr.models[k], &rf.models[k]}) {
        Eigen::MatrixXd sub(phi.rows(), static_cast<Eigen::Index>(m->support.size()));
        for (std::size_t j = 0; j < m->support.size(); ++j)
          sub.col(static_cast<Eigen::Index>(j)) = phi.col(static_cast<Eigen::Index>(m->support[j]));
        const Eigen::VectorXd grad = sub.transpose() * (q0 - sub * m->coefficients);
        CHECK(grad.norm() <= 1e-8 * (sub.transpose() * q0).norm());
        CHECK(m->sse == doctest::Approx((q0 - sub * m->coefficients).squaredNorm()).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("dense coefficients and determinism") {
  const Eigen::MatrixXd phi = test::gaussian_matrix(40, 7, 1);
  const Eigen::VectorXd q0 = test::gaussian_matrix(40, 1, 2);
  const SubsetModel a = exhaustive(phi, q0, 3);
  const SubsetModel b = exhaustive(phi, q0, 3);
  CHECK(a.support == b.support);
  CHECK(a.coefficients == b.coefficients);
  const Eigen::VectorXd dense = dense_coefficients(a, 7);
  CHECK((dense.array() != 0.0).count() == 3);
  for (std::size_t j = 0; j < 3; ++j)
    CHECK(dense[static_cast<Eigen::Index>(a.support[j])] == a.coefficients[static_cast<Eigen::Index>(j)]);
}

TEST_CASE("rank-deficient supports use the minimum-norm solution") {
  Eigen::MatrixXd phi = test::gaussian_matrix(30, 3, 5);
  phi.col(2) = 2.0 * phi.col(0);
  const Eigen::VectorXd q0 = phi.col(0) + phi.col(1);
  const SubsetModel m = fit_support(phi, q0, {0, 1, 2});
  CHECK(m.rank_deficient);
  CHECK(m.sse < 1e-20);
  // minimum norm splits the phi0 contribution as (0.2, 0.4)
  CHECK(m.coefficients[0] == doctest::Approx(0.2));
  CHECK(m.coefficients[2] == doctest::Approx(0.4));
}

TEST_CASE("subset search errors") {
  const Eigen::MatrixXd phi = test::gaussian_matrix(30, 25, 1);
  const Eigen::VectorXd q0 = test::gaussian_matrix(30, 1, 2);
  CHECK_THROWS_AS((exhaustive(phi, q0, 12, 1e5)), InvalidArgument);
  CHECK_THROWS_AS((exhaustive(phi, q0, 0)), InvalidArgument);
  CHECK_THROWS_AS((exhaustive(phi, q0, 26)), InvalidArgument);
  CHECK_THROWS_AS((fit_support(phi, q0, {1, 1})), InvalidArgument);
  CHECK_THROWS_AS((fit_support(phi, q0, {25})), InvalidArgument);
  CHECK_THROWS_AS((fit_support(phi, test::gaussian_matrix(29, 1, 2), {1})), InvalidArgument);
  CHECK_THROWS_AS((parse_solver("lasso")), InvalidArgument);
  CHECK(parse_solver("frols") == Solver::Frols);
  CHECK(to_string(Solver::Refine) == "refine");
}
