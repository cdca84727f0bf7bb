#include <random>

#include "doctest.h"
#include "divstokes/mcs.hpp"
#include "divstokes/suites.hpp"
#include "divstokes/tensor.hpp"
#include "divstokes/verify.hpp"

using namespace divstokes;

namespace {

double relative(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace

TEST_CASE("divergence and compact forms of the stress pairing agree") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  std::mt19937 rng(31);
  for (int k = 0; k < 5; ++k) {
    const DiscreteField tau = random_field(fes, SpaceTag::SigmaH, rng), v = random_field(fes, SpaceTag::Vh, rng),
                        vh = random_field(fes, SpaceTag::VhatH, rng), eta = random_field(fes, SpaceTag::Wh, rng);
    const double a = stress_pairing(tau, v, vh, eta);
    CHECK(std::abs(a - stress_pairing_compact(tau, v, vh, eta)) <= 1e-11 * std::abs(a));
  }
}

TEST_CASE("symmetric stresses do not see the vorticity") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  std::mt19937 rng(32);
  Mat3 g;
  g << 1.0, 0.2, -0.7, 0.4, -0.3, 0.9, 0.5, 0.6, 0.1;
  const Mat3 s = dev(sym(g));
  const DiscreteField tau = interp_Sigma(fes, [&](const Vec3&) { return s; }, 0);
  const DiscreteField eta = random_field(fes, SpaceTag::Wh, rng);
  const double skew = stress_pairing_compact(tau, zero_field(fes, SpaceTag::Vh), zero_field(fes, SpaceTag::VhatH), eta);
  CHECK(std::abs(skew) <= 1e-12 * s.norm() * eta.coeffs.norm());
}

TEST_CASE("element condensation against a block inverse") {
  const Mesh mesh = build_structured_cube(1);
  const FeSpaces fes(mesh);
  for (bool divdiv : {false, true}) {
    const McsElement e = mcs_element(fes, 3, {1e-2, divdiv, HMode::Element});
    const int ns = static_cast<int>(e.mass.rows());
    CHECK(ns == 16);
    // K = [M B; B^T -(C + I)]; its kinematic inverse block is -(C + I + B^T M^-1 B)^-1
    Eigen::MatrixXd k(ns + 24, ns + 24);
    k << e.mass, e.coupling, e.coupling.transpose(), -(e.kinematic + Eigen::MatrixXd::Identity(24, 24));
    const Eigen::MatrixXd kinv = k.fullPivLu().inverse();
    const Eigen::MatrixXd oracle =
        -Eigen::MatrixXd(kinv.bottomRightCorner(24, 24)).fullPivLu().inverse() - Eigen::MatrixXd::Identity(24, 24);
    const Eigen::MatrixXd s = condensed_element(e);
    CHECK((s - oracle).cwiseAbs().maxCoeff() <= 1e-12 * oracle.cwiseAbs().maxCoeff());
    CHECK((e.mass - e.mass.transpose()).cwiseAbs().maxCoeff() < 1e-14 * e.mass.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("condensed and full solves agree") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  const McsSystem sys = assemble_mcs(fes, {1e-4, false, HMode::Element}, build_manufactured(1e-4));
  CHECK(sys.full.symmetric());
  const StokesSolution a = solve_mcs(sys), b = solve_mcs_full(sys);
  CHECK(relative(a.u.coeffs, b.u.coeffs) < 1e-10);
  CHECK(relative(a.uhat.coeffs, b.uhat.coeffs) < 1e-10);
  CHECK(relative(a.omega.coeffs, b.omega.coeffs) < 1e-10);
  CHECK(relative(a.p.coeffs, b.p.coeffs) < 1e-10);
  CHECK(relative(a.sigma->coeffs, b.sigma->coeffs) < 1e-10);
  CHECK(a.div_max <= 1e-10 * std::max(1.0, a.coeff_scale));
  CHECK(stress_trace_defect(*a.sigma) < 1e-12);
  CHECK(stress_nt_jump(*a.sigma) < 1e-8);
}

TEST_CASE("condensed kinematic block is positive definite") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  for (bool divdiv : {false, true}) {
    const SparseMatrix a = assemble_mcs_operator(fes, {1e-4, divdiv, HMode::Element});
    CHECK(a.symmetry_defect() < 1e-12 * a.dense().cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.dense(), Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues()[0] > 0.0);
  }
}

TEST_CASE("zero data gives the zero solution") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  ManufacturedSolution zero;
  zero.nu = 1e-4;
  const StokesSolution s = solve_mcs(assemble_mcs(fes, {1e-4, false, HMode::Element}, zero));
  CHECK(s.u.coeffs.norm() == 0.0);
  CHECK(s.sigma->coeffs.norm() == 0.0);
  CHECK(s.p.coeffs.norm() == 0.0);
}
