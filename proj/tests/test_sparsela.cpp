#include <random>

#include "doctest.h"
#include "divstokes/mcs.hpp"
#include "divstokes/sparsela.hpp"

using namespace divstokes;

namespace {

SparseMatrix from_dense(const Eigen::MatrixXd& d, bool symmetric) {
  std::vector<Triplet> t;
  for (int i = 0; i < d.rows(); ++i)
    for (int j = 0; j < d.cols(); ++j)
      if (d(i, j) != 0.0) t.emplace_back(i, j, d(i, j));
  return SparseMatrix(static_cast<int>(d.rows()), static_cast<int>(d.cols()), t, symmetric);
}

SparseMatrix diagonal(const Eigen::VectorXd& d) { return from_dense(d.asDiagonal().toDenseMatrix(), true); }

}  // namespace

TEST_CASE("duplicate triplets are summed") {
  const SparseMatrix m(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 0, 1.0}}, false);
  CHECK(m.dense()(0, 0) == 3.0);
  CHECK(m.symmetry_defect() == 1.0);
}

TEST_CASE("direct solves") {
  const Eigen::VectorXd b = Eigen::Vector2d(3.0, -1.0);
  CHECK((factor_solve(diagonal(Eigen::Vector2d(1, 1)), b) - b).norm() == 0.0);

  // needs pivoting
  Eigen::MatrixXd swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK((factor_solve(from_dense(swap, true), b) - Eigen::Vector2d(-1.0, 3.0)).norm() < 1e-15);

  // random symmetric saddle point system against a dense solve
  std::mt19937 rng(3);
  std::normal_distribution<double> nd;
  const int n = 40, m = 10;
  Eigen::MatrixXd g(n, n), c(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = nd(rng);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) c(i, j) = nd(rng);
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n + m, n + m);
  k.topLeftCorner(n, n) = g * g.transpose() + Eigen::MatrixXd::Identity(n, n);
  k.topRightCorner(n, m) = c;
  k.bottomLeftCorner(m, n) = c.transpose();
  Eigen::VectorXd rhs(n + m);
  for (int i = 0; i < n + m; ++i) rhs[i] = nd(rng);
  const Eigen::VectorXd ref = k.fullPivLu().solve(rhs);
  SolveStats stats;
  const Eigen::VectorXd x = factor_solve(from_dense(k, true), rhs, &stats);
  CHECK((x - ref).norm() <= 1e-10 * ref.norm());
  CHECK(stats.relative_residual < kSolveTolerance);
  CHECK(stats.dimension == n + m);
}

TEST_CASE("singular matrix is reported") {
  Eigen::MatrixXd s(2, 2);
  s << 1, 1, 1, 1;
  CHECK_THROWS(factor_solve(from_dense(s, true), Eigen::Vector2d(1, 0)));
}

TEST_CASE("condition estimates of diagonal matrices") {
  const CondEstimate c2 = estimate_condition(diagonal(Eigen::Vector2d(1.0, 10.0)));
  CHECK(c2.cond() == doctest::Approx(10.0).epsilon(1e-8));
  Eigen::VectorXd d(100);
  for (int i = 0; i < 100; ++i) d[i] = i + 1.0;
  const CondEstimate c = estimate_condition(diagonal(d));
  CHECK(c.lambda_max == doctest::Approx(100.0).epsilon(1e-6));
  CHECK(c.lambda_min == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(c.cond() == doctest::Approx(100.0).epsilon(1e-6));
}

TEST_CASE("indefinite matrix is rejected") {
  CHECK_THROWS_AS(estimate_condition(diagonal(Eigen::Vector2d(1.0, -1.0))), NotPositiveDefiniteError);
}

TEST_CASE("condition estimate of the condensed stress block against dense eigenvalues") {
  const Mesh mesh = build_structured_cube(1);
  const FeSpaces fes(mesh);
  const SparseMatrix a = assemble_mcs_operator(fes, {1e-4, true, HMode::Element});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.dense());
  const Eigen::VectorXd ev = eig.eigenvalues();
  const CondEstimate c = estimate_condition(a);
  CHECK(ev[0] > 0.0);
  CHECK(c.lambda_max == doctest::Approx(ev[ev.size() - 1]).epsilon(0.05));
  CHECK(c.lambda_min == doctest::Approx(ev[0]).epsilon(0.05));
}

TEST_CASE("largest eigenvalue of an operator") {
  const LanczosResult r = lanczos_largest(
      50, [](const Eigen::VectorXd& x) { return Eigen::VectorXd(x.cwiseProduct(Eigen::VectorXd::LinSpaced(50, 1, 50))); },
      1e-10, 200);
  CHECK(r.converged);
  CHECK(r.lambda == doctest::Approx(50.0).epsilon(1e-8));
}
