#include <random>

#include "doctest.h"
#include "divstokes/fespaces.hpp"
#include "divstokes/interp.hpp"
#include "divstokes/quadrature.hpp"
#include "divstokes/tensor.hpp"

using namespace divstokes;

namespace {

TetVertices random_tet(std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-0.3, 0.3);
  TetVertices v{Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
  for (auto& p : v) p += Vec3(d(rng), d(rng), d(rng));
  Mat3 j;
  for (int k = 0; k < 3; ++k) j.col(k) = v[k + 1] - v[0];
  if (j.determinant() < 0) std::swap(v[2], v[3]);
  return v;
}

Mat3 jacobian(const TetVertices& v) {
  Mat3 j;
  for (int k = 0; k < 3; ++k) j.col(k) = v[k + 1] - v[0];
  return j;
}

Vec3 barycentric_tail(const TetVertices& v, const Vec3& x) { return jacobian(v).inverse() * (x - v[0]); }

double lambda(const TetVertices& v, int a, const Vec3& x) {
  const Vec3 s = barycentric_tail(v, x);
  return a == 0 ? 1.0 - s.sum() : s[a - 1];
}

/// Outward unit normal and area of local facet i.
std::pair<Vec3, double> facet_normal(const TetVertices& v, int i) {
  const auto lv = local_facet_vertices(i);
  Vec3 n = (v[lv[1]] - v[lv[0]]).cross(v[lv[2]] - v[lv[0]]);
  const double area = 0.5 * n.norm();
  n.normalize();
  if (n.dot(v[i] - v[lv[0]]) > 0) n = -n;
  return {n, area};
}

PhysicalRule facet_rule(const TetVertices& v, int i, int deg) {
  const auto lv = local_facet_vertices(i);
  return map_to_triangle(rule_for(2, deg), v[lv[0]], v[lv[1]], v[lv[2]]);
}

// int_T lambda_a lambda_b = |T| (1 + delta_ab) / 20
double exact_mass(const TetVertices& v, const AffineVector& p, const AffineVector& q) {
  const double vol = jacobian(v).determinant() / 6.0;
  double s = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) s += p(v[a]).dot(q(v[b])) * vol * (a == b ? 2.0 : 1.0) / 20.0;
  return s;
}

double quadrature_mass(const TetVertices& v, const AffineVector& p, const AffineVector& q) {
  const PhysicalRule r = map_to_tet(rule_for(3, 4), v[0], jacobian(v));
  double s = 0.0;
  for (std::size_t k = 0; k < r.points.size(); ++k) s += r.weights[k] * p(r.points[k]).dot(q(r.points[k]));
  return s;
}

}  // namespace

TEST_CASE("BDM1 basis is dual to the weighted normal moments") {
  std::mt19937 rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const TetVertices v = random_tet(rng);
    const auto basis = bdm1_local_basis(v);
    for (int i = 0; i < 4; ++i) {
      const auto [n, area] = facet_normal(v, i);
      const auto lv = local_facet_vertices(i);
      const PhysicalRule q = facet_rule(v, i, 2);
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 12; ++j) {
          double m = 0.0;
          for (std::size_t p = 0; p < q.points.size(); ++p)
            m += q.weights[p] * basis[j](q.points[p]).dot(n) * lambda(v, lv[k], q.points[p]);
          CHECK(std::abs(m / area - (j == 3 * i + k ? 1.0 : 0.0)) < 1e-12);
        }
    }
  }
}

TEST_CASE("BDM1 and RT0 mass matrices against a quadrature oracle") {
  std::mt19937 rng(2);
  const TetVertices v = random_tet(rng);
  const auto bdm = bdm1_local_basis(v);
  const auto rt = rt0_local_basis(v);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j)
      CHECK(quadrature_mass(v, bdm[i], bdm[j]) == doctest::Approx(exact_mass(v, bdm[i], bdm[j])).epsilon(1e-12));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(quadrature_mass(v, rt[i], rt[j]) == doctest::Approx(exact_mass(v, rt[i], rt[j])).epsilon(1e-12));
}

TEST_CASE("RT0 basis duality and divergence theorem") {
  std::mt19937 rng(3);
  const TetVertices v = random_tet(rng);
  const auto rt = rt0_local_basis(v);
  const double vol = jacobian(v).determinant() / 6.0;
  for (int j = 0; j < 4; ++j) {
    double flux = 0.0;
    for (int i = 0; i < 4; ++i) {
      const auto [n, area] = facet_normal(v, i);
      const PhysicalRule q = facet_rule(v, i, 2);
      double m = 0.0;
      for (std::size_t p = 0; p < q.points.size(); ++p) {
        m += q.weights[p] * rt[j](q.points[p]).dot(n);
        // normal trace constant on the facet
        CHECK(std::abs(rt[j](q.points[p]).dot(n) - rt[j](q.points[0]).dot(n)) < 1e-12);
      }
      CHECK(std::abs(m / area - (i == j ? 1.0 : 0.0)) < 1e-12);
      flux += m;
    }
    CHECK(std::abs(rt[j].divergence() * vol - flux) < 1e-13);
  }
}

TEST_CASE("constants and rigid motions are representable") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  const Vec3 b(0, 0, 1), a(0.3, -0.2, 0.5);
  const VectorFunction rigid = [&](const Vec3& x) -> Vec3 { return a + b.cross(x); };
  const VectorFunction e1 = [](const Vec3&) -> Vec3 { return Vec3::UnitX(); };
  // interpolants on an unmasked mesh so boundary dofs carry data
  const Mesh open = relabeled(mesh, [](const Vec3&, const Vec3&) { return FacetLabel::Neumann; });
  const FeSpaces ofes(open);
  for (const auto* f : {&rigid, &e1}) {
    const DiscreteField iv = interp_V(ofes, *f, 1);
    for (int t = 0; t < static_cast<int>(open.num_tets()); ++t) {
      const AffineVector l = local_vector(iv, t);
      for (int k : open.tet(t)) CHECK(((*f)(open.vertex(k)) - l(open.vertex(k))).norm() < 1e-13);
    }
  }
  const DiscreteField iw = interp_W(ofes, [](const Vec3&) -> Vec3 { return Vec3(0, 0, 2); }, 0);
  for (int t = 0; t < static_cast<int>(open.num_tets()); ++t)
    CHECK((local_vector(iw, t)(open.tet_centroid(t)) - Vec3(0, 0, 2)).norm() < 1e-13);
}

TEST_CASE("stress space dimension from an independent rank oracle") {
  std::mt19937 rng(4);
  CHECK(sigma_dimension() == 16);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd c = sigma_constraint_matrix(random_tet(rng));
    Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
    lu.setThreshold(1e-10);
    CHECK(32 - lu.rank() == sigma_dimension());
  }
  // constant deviatoric fields satisfy every constraint
  const Eigen::MatrixXd c = sigma_constraint_matrix(random_tet(rng));
  for (int m = 0; m < 8; ++m) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(32);
    for (int a = 0; a < 4; ++a) x[8 * a + m] = 1.0;
    CHECK((c * x).norm() < 1e-13);
  }
}

TEST_CASE("stress basis: trace-free, constant nt-traces, dual functionals") {
  std::mt19937 rng(5);
  const TetVertices v = random_tet(rng);
  const auto basis = sigma_local_basis(v);
  const auto tangents = sigma_facet_tangents(v);
  const auto& dbasis = deviatoric_basis();
  const Vec3 xt = (v[0] + v[1] + v[2] + v[3]) / 4.0;
  REQUIRE(basis.size() == 16);
  for (int j = 0; j < 16; ++j) {
    for (const Vec3& x : v) CHECK(std::abs(basis[j](x).trace()) < 1e-12);
    for (int i = 0; i < 4; ++i) {
      const auto [n, area] = facet_normal(v, i);
      const auto lv = local_facet_vertices(i);
      const Vec3 xf = (v[lv[0]] + v[lv[1]] + v[lv[2]]) / 3.0;
      for (int k = 0; k < 2; ++k) {
        const Vec3& t = tangents[i][k];
        CHECK(std::abs(t.dot(n)) < 1e-14);
        const double c0 = t.dot(basis[j](v[lv[0]]) * n);
        for (int p = 1; p < 3; ++p) CHECK(std::abs(t.dot(basis[j](v[lv[p]]) * n) - c0) < 1e-12);
        CHECK(std::abs(t.dot(basis[j](xf) * n) - (j == 2 * i + k ? 1.0 : 0.0)) < 1e-12);
      }
    }
    for (int k = 0; k < 8; ++k)
      CHECK(std::abs((basis[j](xt).cwiseProduct(dbasis[k])).sum() - (j == 8 + k ? 1.0 : 0.0)) < 1e-12);
  }
  // orthonormal trace-free basis
  for (int a = 0; a < 8; ++a) {
    CHECK(std::abs(dbasis[a].trace()) < 1e-15);
    for (int b = 0; b < 8; ++b) CHECK(std::abs(dbasis[a].cwiseProduct(dbasis[b]).sum() - (a == b)) < 1e-14);
  }
}

TEST_CASE("facet tangents are orthonormal") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f) {
    const auto& t = fes.vhat_tangents(f);
    const Vec3& n = mesh.facet_normal(f);
    CHECK(std::abs(t[0].norm() - 1) < 1e-14);
    CHECK(std::abs(t[1].norm() - 1) < 1e-14);
    CHECK(std::abs(t[0].dot(t[1])) < 1e-14);
    CHECK(std::abs(t[0].dot(n)) < 1e-14);
    CHECK(std::abs(t[1].dot(n)) < 1e-14);
  }
}

TEST_CASE("dof counts and masks") {
  const Mesh m1 = build_structured_cube(1);
  CHECK(build_dofmap(m1, SpaceTag::Qh).n_global == 6);
  const DofMap w = build_dofmap(m1, SpaceTag::Wh);
  CHECK(w.n_global == 18);
  for (int f = 0; f < 18; ++f) CHECK(w.dirichlet_mask[f] == (m1.facet_label(f) == FacetLabel::Dirichlet));

  const Mesh m2 = build_structured_cube(2);
  const DofMap v = build_dofmap(m2, SpaceTag::Vh);
  CHECK(v.n_global == 360);
  const DofMap vh = build_dofmap(m2, SpaceTag::VhatH);
  int non_dirichlet = 0;
  for (int f = 0; f < static_cast<int>(m2.num_facets()); ++f) non_dirichlet += m2.facet_label(f) != FacetLabel::Dirichlet;
  CHECK(vh.n_global == 2 * non_dirichlet);
  CHECK(std::none_of(vh.dirichlet_mask.begin(), vh.dirichlet_mask.end(), [](bool b) { return b; }));
  for (int t = 0; t < static_cast<int>(m2.num_tets()); ++t)
    for (int i = 0; i < 4; ++i) {
      const bool dirichlet = m2.facet_label(m2.tet_facet(t, i)) == FacetLabel::Dirichlet;
      CHECK((vh.dofs(t)[2 * i] < 0) == dirichlet);
    }
  const DofMap s = build_dofmap(m2, SpaceTag::SigmaH);
  CHECK(s.n_global == 16 * 48);
  CHECK(std::none_of(s.dirichlet_mask.begin(), s.dirichlet_mask.end(), [](bool b) { return b; }));
}

TEST_CASE("normal continuity of random Vh and Wh fields") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  std::mt19937 rng(6);
  std::normal_distribution<double> nd;
  for (SpaceTag s : {SpaceTag::Vh, SpaceTag::Wh}) {
    DiscreteField f = zero_field(fes, s);
    for (int i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] = nd(rng);
    double worst = 0.0;
    for (int fc = 0; fc < static_cast<int>(mesh.num_facets()); ++fc) {
      const auto& sides = mesh.facet_sides(fc);
      if (sides.size() < 2) continue;
      const auto& fv = mesh.facet(fc);
      const PhysicalRule q =
          map_to_triangle(rule_for(2, 2), mesh.vertex(fv[0]), mesh.vertex(fv[1]), mesh.vertex(fv[2]));
      const AffineVector a = local_vector(f, sides[0].tet), b = local_vector(f, sides[1].tet);
      for (const Vec3& x : q.points) worst = std::max(worst, std::abs((a(x) - b(x)).dot(mesh.facet_normal(fc))));
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("kinematic index layout") {
  const Mesh mesh = build_structured_cube(2);
  const FeSpaces fes(mesh);
  const KinematicLayout& l = fes.layout();
  CHECK(l.size() == l.n_v + l.n_vhat + l.n_w);
  std::array<int, 24> idx;
  std::array<double, 24> sign;
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    fes.kinematic_indices(t, idx, sign);
    for (int k = 0; k < 24; ++k) {
      if (idx[k] < 0) continue;
      if (k < 12) CHECK(idx[k] < l.n_v);
      else if (k < 20) CHECK((idx[k] >= l.n_v && idx[k] < l.n_v + l.n_vhat));
      else CHECK(idx[k] >= l.n_v + l.n_vhat);
      CHECK(std::abs(sign[k]) == 1.0);
    }
  }
}
