#include <random>

#include "doctest.h"
#include "divstokes/interp.hpp"
#include "divstokes/tensor.hpp"
#include "divstokes/verify.hpp"

using namespace divstokes;

namespace {

const MultiPoly X = MultiPoly::coordinate(0), Y = MultiPoly::coordinate(1), Z = MultiPoly::coordinate(2);

Mesh open_cube(int n) {
  return relabeled(build_structured_cube(n), [](const Vec3&, const Vec3&) { return FacetLabel::Neumann; });
}

}  // namespace

TEST_CASE("affine fields are reproduced by the velocity interpolant") {
  const Mesh mesh = open_cube(2);
  const FeSpaces fes(mesh);
  Mat3 g;
  g << 0.3, -1.0, 0.2, 0.5, 0.1, 0.7, -0.4, 0.9, -0.6;
  const Vec3 c(1.0, -2.0, 0.5);
  const VecPoly u{MultiPoly::constant(c[0]) + g(0, 0) * X + g(0, 1) * Y + g(0, 2) * Z,
                  MultiPoly::constant(c[1]) + g(1, 0) * X + g(1, 1) * Y + g(1, 2) * Z,
                  MultiPoly::constant(c[2]) + g(2, 0) * X + g(2, 1) * Y + g(2, 2) * Z};
  const DiscreteField iu = interp_V(fes, u);
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const AffineVector l = local_vector(iu, t);
    for (int k : mesh.tet(t)) CHECK((l(mesh.vertex(k)) - (c + g * mesh.vertex(k))).norm() < 1e-13);
  }
  // the facet interpolant stores the tangential part at the centroid
  const DiscreteField ih = interp_Vhat(fes, u);
  for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f) {
    const Vec3 x = mesh.facet_frame(f).centroid;
    CHECK((facet_value(ih, f) - tangential(c + g * x, mesh.facet_normal(f))).norm() < 1e-13);
  }
}

TEST_CASE("lowest-order Raviart-Thomas fields are reproduced") {
  const Mesh mesh = open_cube(2);
  const FeSpaces fes(mesh);
  const Vec3 a(0.2, -0.3, 1.1);
  const double b = 0.7;
  const VecPoly w{MultiPoly::constant(a[0]) + b * X, MultiPoly::constant(a[1]) + b * Y,
                  MultiPoly::constant(a[2]) + b * Z};
  const DiscreteField iw = interp_W(fes, w);
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const AffineVector l = local_vector(iw, t);
    for (int k : mesh.tet(t)) CHECK((l(mesh.vertex(k)) - (a + b * mesh.vertex(k))).norm() < 1e-13);
  }
}

TEST_CASE("element averages") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  const DiscreteField q = interp_Q(fes, 2.0 * X - Y + MultiPoly::constant(0.5));
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const Vec3 c = mesh.tet_centroid(t);
    CHECK(element_value(q, t) == doctest::Approx(2 * c[0] - c[1] + 0.5).epsilon(1e-13));
  }
  // average of x^2 over a tet: (sum_a x_a^2 + (sum_a x_a)^2) / 20
  const DiscreteField q2 = interp_Q(fes, X * X);
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    double s = 0.0, s2 = 0.0;
    for (int k : mesh.tet(t)) {
      s += mesh.vertex(k)[0];
      s2 += mesh.vertex(k)[0] * mesh.vertex(k)[0];
    }
    CHECK(element_value(q2, t) == doctest::Approx((s2 + s * s) / 20.0).epsilon(1e-13));
  }
}

TEST_CASE("commuting diagram for the divergence") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  // div (x^2, 0, 0) = 2x, averaged over each tet
  const DiscreteField d = divergence(interp_V(fes, VecPoly{X * X, MultiPoly(), MultiPoly()}));
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t)
    CHECK(element_value(d, t) == doctest::Approx(2.0 * mesh.tet_centroid(t)[0]).epsilon(1e-13));

  std::mt19937 rng(9);
  for (int degree = 1; degree <= 5; ++degree)
    CHECK(commuting_defect(fes, random_vector_polynomial(degree, rng)) < 1e-12);
}

TEST_CASE("stress interpolant reproduces constant trace-free fields") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  Mat3 g;
  g << 0.3, -1.0, 0.2, 0.5, 0.1, 0.7, -0.4, 0.9, -0.6;
  const Mat3 s = dev(sym(g));
  const DiscreteField is = interp_Sigma(fes, [&](const Vec3&) { return s; }, 0);
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const AffineMatrix l = local_matrix(is, t);
    for (int k : mesh.tet(t)) CHECK((l(mesh.vertex(k)) - s).norm() < 1e-13);
    CHECK(l.divergence().norm() < 1e-12);
  }
}

TEST_CASE("interpolation is a projection") {
  std::mt19937 rng(13);
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  for (SpaceTag s : {SpaceTag::Vh, SpaceTag::VhatH, SpaceTag::Wh, SpaceTag::Qh})
    CHECK(idempotence_defect(fes, s, rng) < 1e-12);
  const auto label = [](const Vec3&, const Vec3&) { return FacetLabel::Neumann; };
  const Mesh one({Vec3(0, 0, 0), Vec3(1, 0.1, 0), Vec3(0.2, 1, 0), Vec3(0.1, 0.3, 0.9)}, {{0, 1, 2, 3}}, label);
  const FeSpaces fes1(one);
  CHECK(idempotence_defect(fes1, SpaceTag::SigmaH, rng) < 1e-12);
}

TEST_CASE("kinematic packing round trip") {
  std::mt19937 rng(17);
  std::normal_distribution<double> nd;
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  Eigen::VectorXd x(fes.layout().size());
  for (int i = 0; i < x.size(); ++i) x[i] = nd(rng);
  DiscreteField u, uh, w;
  unpack_kinematic(fes, x, u, uh, w);
  CHECK((pack_kinematic(u, uh, w) - x).norm() == 0.0);
  for (int i = 0; i < u.coeffs.size(); ++i)
    if (fes.dofs(SpaceTag::Vh).dirichlet_mask[i]) CHECK(u.coeffs[i] == 0.0);
}
