#include <random>

#include "doctest.h"
#include "divstokes/hdg.hpp"
#include "divstokes/suites.hpp"

using namespace divstokes;

namespace {

const MultiPoly X = MultiPoly::coordinate(0), Y = MultiPoly::coordinate(1), Z = MultiPoly::coordinate(2);

double min_eigenvalue(const SparseMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.dense(), Eigen::EigenvaluesOnly);
  return eig.eigenvalues()[0];
}

}  // namespace

TEST_CASE("rigid motions carry no energy") {
  const Mesh mesh =
      relabeled(build_structured_cube(2), [](const Vec3&, const Vec3&) { return FacetLabel::Neumann; });
  const FeSpaces fes(mesh);
  // u = a + b x x with b = (0.4, -0.2, 0.3), curl u = 2 b
  const VecPoly u{MultiPoly::constant(1.0) - 0.2 * Z - 0.3 * Y, MultiPoly::constant(-0.5) + 0.3 * X - 0.4 * Z,
                  MultiPoly::constant(0.25) + 0.4 * Y + 0.2 * X};
  const VecPoly omega{MultiPoly::constant(0.8), MultiPoly::constant(-0.4), MultiPoly::constant(0.6)};
  const DiscreteField iu = interp_V(fes, u), ih = interp_Vhat(fes, u), iw = interp_W(fes, omega);
  const HdgParams params{6.0, 1.0, HMode::Element};
  CHECK(std::abs(hdg_energy(iu, ih, iw, params)) < 1e-24);
  const Eigen::VectorXd x = pack_kinematic(iu, ih, iw);
  CHECK(std::abs(x.dot(assemble_hdg_operator(fes, params) * x)) < 1e-12 * x.squaredNorm());
}

TEST_CASE("assembled operator is symmetric and matches the field energy") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  std::mt19937 rng(21);
  for (HMode mode : {HMode::Element, HMode::PerFacet, HMode::Global}) {
    const HdgParams params{6.0, 1e-4, mode};
    const SparseMatrix a = assemble_hdg_operator(fes, params);
    CHECK(a.symmetric());
    CHECK(a.symmetry_defect() < 1e-12 * a.dense().cwiseAbs().maxCoeff());
    for (int k = 0; k < 3; ++k) {
      const DiscreteField u = random_field(fes, SpaceTag::Vh, rng), uh = random_field(fes, SpaceTag::VhatH, rng),
                          w = random_field(fes, SpaceTag::Wh, rng);
      const Eigen::VectorXd x = pack_kinematic(u, uh, w);
      const double e = hdg_energy(u, uh, w, params);
      CHECK(std::abs(x.dot(a * x) - e) <= 1e-10 * std::abs(e));
    }
  }
}

TEST_CASE("element matrices are symmetric") {
  const Mesh mesh = build_structured_cube(1);
  const FeSpaces fes(mesh);
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const ElementMatrix24 m = hdg_element_matrix(fes, t, {6.0, 1.0, HMode::Element});
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-12 * m.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("positive definite for a large enough stabilization") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  CHECK(min_eigenvalue(assemble_hdg_operator(fes, {6.0, 1.0, HMode::Element})) > 0.0);
  CHECK(min_eigenvalue(assemble_hdg_operator(fes, {8.0, 1.0, HMode::PerFacet})) > 0.0);
  // too small a stabilization loses definiteness
  CHECK(min_eigenvalue(assemble_hdg_operator(fes, {2.0, 1.0, HMode::Element})) < 0.0);
}

TEST_CASE("operator scales linearly with the viscosity") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  const Eigen::MatrixXd a1 = assemble_hdg_operator(fes, {6.0, 1.0, HMode::Element}).dense();
  const Eigen::MatrixXd a2 = assemble_hdg_operator(fes, {6.0, 0.25, HMode::Element}).dense();
  CHECK((0.25 * a1 - a2).cwiseAbs().maxCoeff() < 1e-14 * a1.cwiseAbs().maxCoeff());
}

TEST_CASE("zero data gives the zero solution") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  ManufacturedSolution zero;
  zero.nu = 1e-4;
  const StokesSolution s = solve_hdg(assemble_hdg(fes, {6.0, 1e-4, HMode::Element}, zero));
  CHECK(s.u.coeffs.norm() == 0.0);
  CHECK(s.omega.coeffs.norm() == 0.0);
  CHECK(s.p.coeffs.norm() == 0.0);
}

TEST_CASE("discrete solution is exactly divergence free") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  const StokesSolution s = solve_hdg(assemble_hdg(fes, {6.0, 1e-4, HMode::Element}, build_manufactured(1e-4)));
  CHECK(s.div_max <= 1e-10 * std::max(1.0, s.coeff_scale));
  CHECK(s.stats.relative_residual < kSolveTolerance);
}
