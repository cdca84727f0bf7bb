#include <random>

#include "doctest.h"
#include "divstokes/suites.hpp"

using namespace divstokes;

namespace {

const MultiPoly X = MultiPoly::coordinate(0), Y = MultiPoly::coordinate(1), Z = MultiPoly::coordinate(2);

Mesh::Labeler all_neumann() {
  return [](const Vec3&, const Vec3&) { return FacetLabel::Neumann; };
}

// Two tets glued along the triangle (0,0,0), (1,0,0), (0,1,0).
Mesh two_tets() {
  return Mesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0.2, 0.3, 1.0), Vec3(0.3, 0.2, -1.0)},
              {{0, 1, 2, 3}, {0, 1, 2, 4}}, all_neumann());
}

int shared_facet(const Mesh& m) {
  for (int f = 0; f < static_cast<int>(m.num_facets()); ++f)
    if (m.facet_sides(f).size() == 2) return f;
  return -1;
}

}  // namespace

TEST_CASE("bracket") {
  Bracket b;
  for (double v : {2.0, 0.5, 1.0}) b.add(v);
  CHECK(b.min == 0.5);
  CHECK(b.max == 2.0);
  CHECK(b.count == 3);
  Bracket c;
  c.add(0.6);
  c.add(1.0);
  CHECK(b.variation(c) == doctest::Approx(0.5));
}

TEST_CASE("rigid motions are in the kernel of the jump terms") {
  const Mesh mesh = relabeled(build_structured_cube(2), all_neumann());
  const FeSpaces fes(mesh);
  const VecPoly u{MultiPoly::constant(0.3) + Z - 0.5 * Y, 0.5 * X - 0.2 * Z, 0.2 * Y - X};
  const KornTerms k = korn_terms(interp_V(fes, u));
  CHECK(k.grad_sq > 0.1);
  CHECK(k.eps_sq < 1e-26);
  CHECK(k.rigid_jump < 1e-26);
  CHECK(k.mean_jump < 1e-26);
  CHECK(k.curl_jump < 1e-26);
}

TEST_CASE("piecewise rotation about the shared facet normal") {
  // zero on one tet, n x (x - x_F) on the other: normal trace continuous,
  // mean tangential jump zero, but the jump is a nonzero tangential rotation
  const Mesh mesh = two_tets();
  const FeSpaces fes(mesh);
  const Vec3 xf(1.0 / 3, 1.0 / 3, 0.0);
  const DiscreteField u = interp_V(
      fes, [&](const Vec3& x) -> Vec3 { return x[2] < 0 ? Vec3(Vec3::UnitZ().cross(x - xf)) : Vec3::Zero(); }, 1);
  const int f = shared_facet(mesh);
  REQUIRE(f >= 0);
  const FacetJump j = facet_jump(u, f);
  CHECK(j.mean_sq < 1e-28);
  CHECK(j.rigid_sq > 1e-3);
  CHECK(j.full_sq == doctest::Approx(j.rigid_sq).epsilon(1e-12));
  CHECK(j.rotation == doctest::Approx(j.rotation_formula).epsilon(1e-12));
  // n . [curl u] = 2 on a facet of area 1/2
  CHECK(j.curl_jump_sq == doctest::Approx(4.0 * 0.5).epsilon(1e-12));

  const KornTerms k = korn_terms(u);
  CHECK(k.grad_sq > 0.0);
  CHECK(k.eps_sq < 1e-28);
  CHECK(k.mean_jump < 1e-28);
  CHECK(k.rigid_jump > 0.0);
  CHECK(k.curl_jump > 0.0);
}

TEST_CASE("facet identities on random fields") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  std::mt19937 rng(41);
  const DiscreteField u = random_field(fes, SpaceTag::Vh, rng);
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); t += 5)
    for (int i = 0; i < 4; ++i) CHECK(rotation_identity_defect(u, t, i) < 1e-12);
  for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f) {
    const FacetJump j = facet_jump(u, f);
    CHECK(j.mean_sq <= j.rigid_sq * (1 + 1e-12) + 1e-300);
    CHECK(j.rigid_sq <= j.full_sq * (1 + 1e-12) + 1e-300);
    CHECK(std::abs(j.rotation - j.rotation_formula) <= 1e-10 * std::max(1.0, j.rotation));
  }
}

TEST_CASE("averaged curl matches the normal curl of a smooth field") {
  const Mesh mesh = relabeled(build_structured_cube(2), all_neumann());
  const FeSpaces fes(mesh);
  const VecPoly u{-1.0 * Y, X, MultiPoly()};
  const DiscreteField w = averaged_curl(interp_V(fes, u));
  for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f)
    CHECK(w.coeffs[f] == doctest::Approx(2.0 * mesh.facet_normal(f)[2]).epsilon(1e-12));
}

TEST_CASE("norms vanish on interpolated rigid triples") {
  const Mesh mesh = relabeled(build_structured_cube(2), all_neumann());
  const FeSpaces fes(mesh);
  const VecPoly u{-1.0 * Y, X, MultiPoly::constant(1.0)};
  const VecPoly omega{MultiPoly(), MultiPoly(), MultiPoly::constant(2.0)};
  const KinematicNorms k = kinematic_norms(interp_V(fes, u), interp_Vhat(fes, u), interp_W(fes, omega));
  CHECK(k.grad > 0.5);
  CHECK(k.triple < 1e-26);
  CHECK(k.eps < 1e-26);
  CHECK(k.stress < 1e-26);
  CHECK(k.div_u < 1e-26);
  CHECK(k.div_omega < 1e-26);
}

TEST_CASE("sampling suites are deterministic and bounded") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  const KornStats a = korn_suite(fes, 10, 5), b = korn_suite(fes, 10, 5);
  CHECK(a.samples == 10);
  CHECK(a.grad_bound.min == b.grad_bound.min);
  CHECK(a.grad_bound.min > 0.0);
  CHECK(a.hdg_korn.min > 0.0);
  CHECK(a.identity_defect < 1e-12);
  CHECK(a.rotation_defect < 1e-12);
  CHECK(a.chain_violation < 1e-12);

  const NormEquivalenceStats n = norm_equivalence_suite(fes, 10, 5);
  CHECK(n.pythagoras_defect < 1e-12);
  CHECK(n.curl_kappa.min == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(n.kappa_h1.max == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
  CHECK(n.triple_vs_eps.min > 0.0);
  CHECK(n.eps_vs_stress.min > 0.0);
}
