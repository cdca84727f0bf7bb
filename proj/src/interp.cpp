#include "divstokes/interp.hpp"

#include <algorithm>
#include <stdexcept>

#include "divstokes/quadrature.hpp"

namespace divstokes {

namespace {

int capped(int degree) { return std::clamp(degree, 0, kMaxQuadratureDegree); }

PhysicalRule facet_rule(const Mesh& mesh, int f, int degree) {
  const auto& fv = mesh.facet(f);
  return map_to_triangle(rule_for(2, capped(degree)), mesh.vertex(fv[0]), mesh.vertex(fv[1]), mesh.vertex(fv[2]));
}

PhysicalRule tet_rule(const Mesh& mesh, int t, int degree) {
  const auto g = mesh.element_geometry(t);
  return map_to_tet(rule_for(3, capped(degree)), mesh.vertex(mesh.tet(t)[0]), g.jacobian);
}

// Barycentric coordinates of x with respect to triangle (p0, p1, p2).
Vec3 triangle_barycentric(const Vec3& x, const Vec3& p0, const Vec3& p1, const Vec3& p2) {
  Eigen::Matrix<double, 3, 2> e;
  e.col(0) = p1 - p0;
  e.col(1) = p2 - p0;
  const Eigen::Vector2d rs = (e.transpose() * e).ldlt().solve(e.transpose() * (x - p0));
  return {1.0 - rs[0] - rs[1], rs[0], rs[1]};
}

}  // namespace

DiscreteField zero_field(const FeSpaces& fes, SpaceTag space) {
  DiscreteField d;
  d.space = space;
  d.fes = &fes;
  d.coeffs = Eigen::VectorXd::Zero(fes.dofs(space).n_global);
  return d;
}

AffineVector local_vector(const DiscreteField& field, int t) {
  const FeSpaces& fes = *field.fes;
  const DofMap& dm = fes.dofs(field.space);
  const int* dofs = dm.dofs(t);
  const std::int8_t* signs = dm.signs(t);
  AffineVector r;
  auto accumulate = [&](const auto& basis) {
    r.origin = basis[0].origin;
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const double c = signs[k] * field.coeffs[dofs[k]];
      r.value += c * basis[k].value;
      r.gradient += c * basis[k].gradient;
    }
  };
  if (field.space == SpaceTag::Vh)
    accumulate(fes.bdm(t));
  else if (field.space == SpaceTag::Wh)
    accumulate(fes.rt(t));
  else
    throw std::invalid_argument("local_vector: field is not in Vh or Wh");
  return r;
}

AffineMatrix local_matrix(const DiscreteField& field, int t) {
  if (field.space != SpaceTag::SigmaH) throw std::invalid_argument("local_matrix: field is not in SigmaH");
  const auto& basis = field.fes->sigma(t);
  const int* dofs = field.fes->dofs(SpaceTag::SigmaH).dofs(t);
  AffineMatrix r;
  r.origin = basis[0].origin;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const double c = field.coeffs[dofs[j]];
    r.value += c * basis[j].value;
    for (int k = 0; k < 3; ++k) r.slope[k] += c * basis[j].slope[k];
  }
  return r;
}

Vec3 facet_value(const DiscreteField& field, int f) {
  if (field.space != SpaceTag::VhatH) throw std::invalid_argument("facet_value: field is not in VhatH");
  const FeSpaces& fes = *field.fes;
  const auto& sides = fes.mesh().facet_sides(f);
  const int* dofs = fes.dofs(SpaceTag::VhatH).dofs(sides[0].tet);
  const int first = dofs[2 * sides[0].local];
  if (first < 0) return Vec3::Zero();
  const auto& t = fes.vhat_tangents(f);
  return field.coeffs[first] * t[0] + field.coeffs[first + 1] * t[1];
}

double element_value(const DiscreteField& field, int t) {
  if (field.space != SpaceTag::Qh) throw std::invalid_argument("element_value: field is not in Qh");
  return field.coeffs[t];
}

DiscreteField interp_V(const FeSpaces& fes, const VectorFunction& u, int degree) {
  const Mesh& mesh = fes.mesh();
  DiscreteField r = zero_field(fes, SpaceTag::Vh);
  for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f) {
    const auto& fv = mesh.facet(f);
    const Vec3& n = mesh.facet_normal(f);
    const PhysicalRule q = facet_rule(mesh, f, degree + 1);
    Vec3 m = Vec3::Zero();
    double area = 0.0;
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      const Vec3 lam = triangle_barycentric(q.points[k], mesh.vertex(fv[0]), mesh.vertex(fv[1]), mesh.vertex(fv[2]));
      m += q.weights[k] * u(q.points[k]).dot(n) * lam;
      area += q.weights[k];
    }
    for (int a = 0; a < 3; ++a) r.coeffs[3 * f + a] = m[a] / area;
  }
  return r;
}

DiscreteField interp_V(const FeSpaces& fes, const VecPoly& u) {
  return interp_V(fes, [&u](const Vec3& x) { return evaluate(u, x); }, degree(u));
}

DiscreteField interp_W(const FeSpaces& fes, const VectorFunction& w, int degree) {
  const Mesh& mesh = fes.mesh();
  DiscreteField r = zero_field(fes, SpaceTag::Wh);
  for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f) {
    const Vec3& n = mesh.facet_normal(f);
    const PhysicalRule q = facet_rule(mesh, f, degree);
    double m = 0.0, area = 0.0;
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      m += q.weights[k] * w(q.points[k]).dot(n);
      area += q.weights[k];
    }
    r.coeffs[f] = m / area;
  }
  return r;
}

DiscreteField interp_W(const FeSpaces& fes, const VecPoly& w) {
  return interp_W(fes, [&w](const Vec3& x) { return evaluate(w, x); }, degree(w));
}

DiscreteField interp_Vhat(const FeSpaces& fes, const VectorFunction& u, int degree) {
  const Mesh& mesh = fes.mesh();
  DiscreteField r = zero_field(fes, SpaceTag::VhatH);
  const DofMap& dm = fes.dofs(SpaceTag::VhatH);
  for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f) {
    const FacetSide& s = mesh.facet_sides(f)[0];
    const int first = dm.dofs(s.tet)[2 * s.local];
    if (first < 0) continue;
    const auto& t = fes.vhat_tangents(f);
    const PhysicalRule q = facet_rule(mesh, f, degree);
    Vec3 m = Vec3::Zero();
    double area = 0.0;
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      m += q.weights[k] * u(q.points[k]);
      area += q.weights[k];
    }
    m /= area;
    r.coeffs[first] = m.dot(t[0]);
    r.coeffs[first + 1] = m.dot(t[1]);
  }
  return r;
}

DiscreteField interp_Vhat(const FeSpaces& fes, const VecPoly& u) {
  return interp_Vhat(fes, [&u](const Vec3& x) { return evaluate(u, x); }, degree(u));
}

DiscreteField interp_Q(const FeSpaces& fes, const ScalarFunction& p, int degree) {
  const Mesh& mesh = fes.mesh();
  DiscreteField r = zero_field(fes, SpaceTag::Qh);
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const PhysicalRule q = tet_rule(mesh, t, degree);
    double m = 0.0, vol = 0.0;
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      m += q.weights[k] * p(q.points[k]);
      vol += q.weights[k];
    }
    r.coeffs[t] = m / vol;
  }
  return r;
}

DiscreteField interp_Q(const FeSpaces& fes, const MultiPoly& p) {
  return interp_Q(fes, [&p](const Vec3& x) { return p(x); }, std::max(p.degree(), 0));
}

DiscreteField interp_Sigma(const FeSpaces& fes, const MatrixFunction& sigma, int degree) {
  const Mesh& mesh = fes.mesh();
  DiscreteField r = zero_field(fes, SpaceTag::SigmaH);
  const DofMap& dm = fes.dofs(SpaceTag::SigmaH);
  const auto& dev_basis = deviatoric_basis();
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const TetVertices tv = tet_vertices(mesh, t);
    const auto tangents = sigma_facet_tangents(tv);
    const int* dofs = dm.dofs(t);
    for (int i = 0; i < 4; ++i) {
      const int f = mesh.tet_facet(t, i);
      const Vec3 n = mesh.local_outward_normal(t, i);
      const PhysicalRule q = facet_rule(mesh, f, degree);
      Vec3 m = Vec3::Zero();
      double area = 0.0;
      for (std::size_t k = 0; k < q.points.size(); ++k) {
        m += q.weights[k] * (sigma(q.points[k]) * n);
        area += q.weights[k];
      }
      m /= area;
      r.coeffs[dofs[2 * i]] = tangents[i][0].dot(m);
      r.coeffs[dofs[2 * i + 1]] = tangents[i][1].dot(m);
    }
    const PhysicalRule q = tet_rule(mesh, t, degree);
    Mat3 avg = Mat3::Zero();
    double vol = 0.0;
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      avg += q.weights[k] * sigma(q.points[k]);
      vol += q.weights[k];
    }
    avg /= vol;
    for (int k = 0; k < 8; ++k) r.coeffs[dofs[8 + k]] = (avg.array() * dev_basis[k].array()).sum();
  }
  return r;
}

DiscreteField interp_Sigma(const FeSpaces& fes, const MatPoly& sigma) {
  return interp_Sigma(fes, [&sigma](const Vec3& x) { return evaluate(sigma, x); }, degree(sigma));
}

DiscreteField divergence(const DiscreteField& v) {
  if (v.space != SpaceTag::Vh) throw std::invalid_argument("divergence: field is not in Vh");
  DiscreteField r = zero_field(*v.fes, SpaceTag::Qh);
  for (int t = 0; t < static_cast<int>(v.fes->mesh().num_tets()); ++t) r.coeffs[t] = local_vector(v, t).divergence();
  return r;
}

Eigen::VectorXd pack_kinematic(const DiscreteField& u, const DiscreteField& uhat, const DiscreteField& omega) {
  const KinematicLayout& l = u.fes->layout();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(l.size());
  for (int g = 0; g < u.coeffs.size(); ++g)
    if (l.v_index[g] >= 0) x[l.v_index[g]] = u.coeffs[g];
  for (int g = 0; g < uhat.coeffs.size(); ++g)
    if (l.vhat_index[g] >= 0) x[l.vhat_index[g]] = uhat.coeffs[g];
  for (int g = 0; g < omega.coeffs.size(); ++g)
    if (l.w_index[g] >= 0) x[l.w_index[g]] = omega.coeffs[g];
  return x;
}

void unpack_kinematic(const FeSpaces& fes, const Eigen::VectorXd& x, DiscreteField& u, DiscreteField& uhat,
                      DiscreteField& omega) {
  const KinematicLayout& l = fes.layout();
  u = zero_field(fes, SpaceTag::Vh);
  uhat = zero_field(fes, SpaceTag::VhatH);
  omega = zero_field(fes, SpaceTag::Wh);
  for (int g = 0; g < u.coeffs.size(); ++g)
    if (l.v_index[g] >= 0) u.coeffs[g] = x[l.v_index[g]];
  for (int g = 0; g < uhat.coeffs.size(); ++g)
    if (l.vhat_index[g] >= 0) uhat.coeffs[g] = x[l.vhat_index[g]];
  for (int g = 0; g < omega.coeffs.size(); ++g)
    if (l.w_index[g] >= 0) omega.coeffs[g] = x[l.w_index[g]];
}

}  // namespace divstokes
