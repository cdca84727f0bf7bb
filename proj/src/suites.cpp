#include "divstokes/suites.hpp"

#include <algorithm>
#include <cmath>

#include "divstokes/quadrature.hpp"
#include "divstokes/tensor.hpp"

namespace divstokes {

void Bracket::add(double v) {
  min = std::min(min, v);
  max = std::max(max, v);
  ++count;
}

double Bracket::variation(const Bracket& other) const {
  return std::max(std::abs(other.min / min - 1.0), std::abs(other.max / max - 1.0));
}

namespace {

PhysicalRule facet_rule(const Mesh& mesh, int f, int degree) {
  const auto& fv = mesh.facet(f);
  return map_to_triangle(rule_for(2, degree), mesh.vertex(fv[0]), mesh.vertex(fv[1]), mesh.vertex(fv[2]));
}

PhysicalRule tet_rule(const Mesh& mesh, int t, int degree) {
  return map_to_tet(rule_for(3, degree), mesh.vertex(mesh.tet(t)[0]), mesh.element_geometry(t).jacobian);
}

/// || a(x) ||_T^2 for an affine vector field on tet t.
double affine_norm_sq(const Mesh& mesh, int t, const AffineVector& a) {
  const PhysicalRule q = tet_rule(mesh, t, 2);
  double s = 0.0;
  for (std::size_t k = 0; k < q.points.size(); ++k) s += q.weights[k] * a(q.points[k]).squaredNorm();
  return s;
}

/// || n.a ||_F^2 for an affine vector field.
double normal_norm_sq(const Mesh& mesh, int f, const Vec3& n, const AffineVector& a) {
  const PhysicalRule q = facet_rule(mesh, f, 2);
  double s = 0.0;
  for (std::size_t k = 0; k < q.points.size(); ++k) {
    const double v = n.dot(a(q.points[k]));
    s += q.weights[k] * v * v;
  }
  return s;
}

AffineVector difference(const AffineVector& c, const AffineVector& w) {
  AffineVector d = w;
  d.value = c(w.origin) - w.value;
  d.gradient = c.gradient - w.gradient;
  return d;
}

AffineVector constant_field(const Vec3& c) {
  AffineVector a;
  a.value = c;
  return a;
}

}  // namespace

FacetJump facet_jump(const DiscreteField& u, int f) {
  const Mesh& mesh = u.fes->mesh();
  const FacetFrame fr = mesh.facet_frame(f);
  const Vec3& n = mesh.facet_normal(f);
  const auto& sides = mesh.facet_sides(f);
  const AffineVector a = local_vector(u, sides[0].tet);
  AffineVector b;
  if (sides.size() > 1) b = local_vector(u, sides[1].tet);

  // Projection onto span{t1, t2, n x x} through its Gram matrix; the rotation
  // is deliberately not centered so the closed form below is a real check.
  const PhysicalRule q = facet_rule(mesh, f, 4);
  auto basis = [&](const Vec3& x) {
    Eigen::Matrix3d m;
    m.col(0) = fr.tangent1;
    m.col(1) = fr.tangent2;
    m.col(2) = n.cross(x);
    return m;
  };
  Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
  Vec3 rhs = Vec3::Zero(), mean = Vec3::Zero();
  double full = 0.0, rr = 0.0, rg = 0.0;
  std::vector<Vec3> g(q.points.size());
  for (std::size_t k = 0; k < q.points.size(); ++k) {
    const Vec3& x = q.points[k];
    const double w = q.weights[k];
    g[k] = tangential(a(x) - (sides.size() > 1 ? b(x) : Vec3::Zero()), n);
    const Eigen::Matrix3d m = basis(x);
    gram += w * m.transpose() * m;
    rhs += w * m.transpose() * g[k];
    mean += w * g[k];
    full += w * g[k].squaredNorm();
    const Vec3 r = n.cross(x - fr.centroid);
    rr += w * r.squaredNorm();
    rg += w * r.dot(g[k]);
  }
  mean /= fr.area;
  const Vec3 c = gram.ldlt().solve(rhs);

  FacetJump j;
  j.full_sq = full;
  j.mean_sq = fr.area * mean.squaredNorm();
  for (std::size_t k = 0; k < q.points.size(); ++k) {
    const Vec3 pr = basis(q.points[k]) * c;
    j.rigid_sq += q.weights[k] * pr.squaredNorm();
    j.rotation += q.weights[k] * (pr - mean).squaredNorm();
  }
  j.rotation = std::sqrt(j.rotation);
  j.rotation_formula = std::abs(rg) / std::sqrt(rr);
  const Vec3 dc = a.curl() - (sides.size() > 1 ? b.curl() : Vec3::Zero());
  j.curl_jump_sq = fr.area * std::pow(dc.dot(n), 2);
  return j;
}

double rotation_identity_defect(const DiscreteField& u, int t, int i) {
  const Mesh& mesh = u.fes->mesh();
  const int f = mesh.tet_facet(t, i);
  const FacetFrame fr = mesh.facet_frame(f);
  const Vec3 n = mesh.local_outward_normal(t, i);
  const AffineVector w = local_vector(u, t);
  const Mat3 e = w.sym_gradient();
  const double nc = n.dot(w.curl());
  const PhysicalRule q = facet_rule(mesh, f, 4);
  double lhs = 0.0, rhs = 0.0, rr = 0.0, ww = 0.0;
  for (std::size_t k = 0; k < q.points.size(); ++k) {
    const Vec3 d = q.points[k] - fr.centroid;
    const Vec3 r = n.cross(d);
    const Vec3 wx = w(q.points[k]);
    lhs += q.weights[k] * r.dot(wx);
    rhs += q.weights[k] * (r.dot(e * d) + 0.5 * d.squaredNorm() * nc);
    rr += q.weights[k] * r.squaredNorm();
    ww += q.weights[k] * wx.squaredNorm();
  }
  const double scale = std::sqrt(rr * ww);
  return scale > 0.0 ? std::abs(lhs - rhs) / scale : std::abs(lhs - rhs);
}

KornTerms korn_terms(const DiscreteField& u) {
  const Mesh& mesh = u.fes->mesh();
  const double h = mesh.h_max();
  KornTerms k;
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const AffineVector a = local_vector(u, t);
    const double vol = mesh.element_geometry(t).volume;
    k.grad_sq += vol * a.gradient.squaredNorm();
    k.eps_sq += vol * a.sym_gradient().squaredNorm();
  }
  for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f) {
    if (mesh.facet_label(f) == FacetLabel::Neumann) continue;
    const FacetJump j = facet_jump(u, f);
    k.rigid_jump += j.rigid_sq / h;
    k.mean_jump += j.mean_sq / h;
    k.curl_jump += h * j.curl_jump_sq;
  }
  return k;
}

KinematicNorms kinematic_norms(const DiscreteField& u, const DiscreteField& uhat, const DiscreteField& omega) {
  const Mesh& mesh = u.fes->mesh();
  const double h = mesh.h_max();
  KinematicNorms r;
  double eps_sq = 0.0, jump = 0.0, normal = 0.0, rot = 0.0, dev_sq = 0.0, grad_sq = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const AffineVector a = local_vector(u, t);
    const AffineVector w = local_vector(omega, t);
    const double vol = mesh.element_geometry(t).volume;
    const AffineVector cw = difference(constant_field(a.curl()), w);
    grad_sq += vol * a.gradient.squaredNorm();
    eps_sq += vol * a.sym_gradient().squaredNorm();
    rot += affine_norm_sq(mesh, t, cw);
    dev_sq += vol * (dev(a.gradient) - kappa(w(mesh.tet_centroid(t)))).squaredNorm();
    r.div_u += vol * std::pow(a.divergence(), 2);
    r.div_omega += h * h * vol * std::pow(w.divergence(), 2);
    for (int i = 0; i < 4; ++i) {
      const int f = mesh.tet_facet(t, i);
      const FacetFrame fr = mesh.facet_frame(f);
      const Vec3 n = mesh.local_outward_normal(t, i);
      const Vec3 m = tangential(a(fr.centroid), n) - facet_value(uhat, f);
      jump += fr.area * m.squaredNorm() / h;
      normal += h * normal_norm_sq(mesh, f, n, cw);
    }
  }
  r.grad = grad_sq + jump;
  r.triple = eps_sq + jump + normal;
  r.eps = eps_sq + jump + rot;
  r.stress = dev_sq + jump;
  return r;
}

DiscreteField averaged_curl(const DiscreteField& u) {
  const FeSpaces& fes = *u.fes;
  const Mesh& mesh = fes.mesh();
  DiscreteField w = zero_field(fes, SpaceTag::Wh);
  for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f) {
    if (mesh.facet_label(f) == FacetLabel::Dirichlet) continue;
    const auto& sides = mesh.facet_sides(f);
    Vec3 c = Vec3::Zero();
    for (const auto& s : sides) c += local_vector(u, s.tet).curl();
    w.coeffs[f] = (c / static_cast<double>(sides.size())).dot(mesh.facet_normal(f));
  }
  return w;
}

DiscreteField random_field(const FeSpaces& fes, SpaceTag space, std::mt19937& rng) {
  std::normal_distribution<double> normal;
  DiscreteField r = zero_field(fes, space);
  const auto& mask = fes.dofs(space).dirichlet_mask;
  for (int i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] = mask[i] ? 0.0 : normal(rng);
  return r;
}

KornStats korn_suite(const FeSpaces& fes, int samples, unsigned seed) {
  const Mesh& mesh = fes.mesh();
  std::mt19937 rng(seed);
  KornStats s;
  s.samples = samples;
  for (int k = 0; k < samples; ++k) {
    const DiscreteField u = random_field(fes, SpaceTag::Vh, rng);
    const DiscreteField uhat = random_field(fes, SpaceTag::VhatH, rng);
    const DiscreteField omega = random_field(fes, SpaceTag::Wh, rng);

    const KornTerms kt = korn_terms(u);
    s.grad_bound.add(kt.grad_sq / (kt.eps_sq + kt.rigid_jump));
    s.jump_equivalence.add((kt.eps_sq + kt.rigid_jump) / (kt.eps_sq + kt.mean_jump + kt.curl_jump));

    const KinematicNorms random_w = kinematic_norms(u, uhat, omega);
    s.hdg_korn.add(random_w.grad / random_w.triple);
    const KinematicNorms averaged = kinematic_norms(u, uhat, averaged_curl(u));
    s.hdg_korn_reverse.add(averaged.triple / averaged.grad);

    for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f) {
      const FacetJump j = facet_jump(u, f);
      const double scale = std::max(std::sqrt(j.full_sq), 1e-300);
      s.rotation_defect = std::max(s.rotation_defect, std::abs(j.rotation - j.rotation_formula) / scale);
      s.chain_violation =
          std::max({s.chain_violation, (j.mean_sq - j.rigid_sq) / (scale * scale), (j.rigid_sq - j.full_sq) / (scale * scale)});
      for (const auto& side : mesh.facet_sides(f))
        s.identity_defect = std::max(s.identity_defect, rotation_identity_defect(u, side.tet, side.local));
    }
  }
  return s;
}

namespace {

/// Row-wise curl of x -> kappa(w(x)) for affine w (constant).
Mat3 curl_of_kappa(const Mat3& grad_w) {
  std::array<Mat3, 3> dk;  // d/dx_b kappa(w)
  for (int b = 0; b < 3; ++b) dk[b] = kappa(Vec3(grad_w.col(b)));
  Mat3 c;
  for (int i = 0; i < 3; ++i) {
    c(i, 0) = dk[1](i, 2) - dk[2](i, 1);
    c(i, 1) = dk[2](i, 0) - dk[0](i, 2);
    c(i, 2) = dk[0](i, 1) - dk[1](i, 0);
  }
  return c;
}

}  // namespace

NormEquivalenceStats norm_equivalence_suite(const FeSpaces& fes, int samples, unsigned seed) {
  const Mesh& mesh = fes.mesh();
  const double h = mesh.h_max();
  std::mt19937 rng(seed);
  NormEquivalenceStats s;
  s.samples = samples;
  for (int k = 0; k < samples; ++k) {
    const DiscreteField u = random_field(fes, SpaceTag::Vh, rng);
    const DiscreteField uhat = random_field(fes, SpaceTag::VhatH, rng);
    const DiscreteField omega = random_field(fes, SpaceTag::Wh, rng);

    for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
      const AffineVector a = local_vector(u, t);
      const AffineVector w = local_vector(omega, t);
      const double vol = mesh.element_geometry(t).volume;
      const AffineVector cw = difference(constant_field(a.curl()), w);

      const double rot = affine_norm_sq(mesh, t, cw);
      double normal = 0.0;
      for (int i = 0; i < 4; ++i)
        normal += h * normal_norm_sq(mesh, mesh.tet_facet(t, i), mesh.local_outward_normal(t, i), cw);
      s.curl_normal.add(rot / normal);

      const double div_w = vol * std::pow(w.divergence(), 2);
      double h1 = 0.0;
      for (int b = 0; b < 3; ++b) h1 += vol * kappa(Vec3(w.gradient.col(b))).squaredNorm();
      s.curl_kappa.add(vol * curl_of_kappa(w.gradient).squaredNorm() / div_w);
      s.kappa_h1.add(h1 / div_w);

      const double eps_sq = vol * a.sym_gradient().squaredNorm();
      const double div_u = vol * std::pow(a.divergence(), 2);
      const double dev_mean = vol * (dev(a.gradient) - kappa(w(mesh.tet_centroid(t)))).squaredNorm();
      s.elementwise.add((eps_sq + rot) / (dev_mean + h * h * div_w + div_u));

      const PhysicalRule q = tet_rule(mesh, t, 2);
      double dev_full = 0.0;
      for (std::size_t m = 0; m < q.points.size(); ++m)
        dev_full += q.weights[m] * (dev(a.gradient) - kappa(w(q.points[m]))).squaredNorm();
      const double lhs = eps_sq + 0.5 * rot;
      const double rhs = dev_full + div_u / 3.0;
      s.pythagoras_defect = std::max(s.pythagoras_defect, std::abs(lhs - rhs) / std::max(lhs, rhs));
    }

    const KinematicNorms kn = kinematic_norms(u, uhat, omega);
    s.triple_vs_eps.add(kn.triple / kn.eps);
    s.eps_vs_stress.add(kn.eps / (kn.stress + kn.div_u + kn.div_omega));
  }
  return s;
}

InterpolationErrors interpolation_errors(const FeSpaces& fes, const ManufacturedSolution& ms) {
  const Mesh& mesh = fes.mesh();
  const double h = mesh.h_max();
  const DiscreteField iu = interp_V(fes, ms.u);
  const DiscreteField iuhat = interp_Vhat(fes, ms.u);
  const DiscreteField iw = interp_W(fes, ms.omega);
  const DiscreteField is = interp_Sigma(fes, ms.sigma);
  const MatPoly grad_u = gradient(ms.u);

  double eps_sq = 0.0, grad_sq = 0.0, jump = 0.0, normal = 0.0, eps_nt = 0.0, stress = 0.0, stress_nt = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const AffineVector a = local_vector(iu, t);
    const AffineVector w = local_vector(iw, t);
    const AffineMatrix sig = local_matrix(is, t);
    const PhysicalRule q = tet_rule(mesh, t, kMaxQuadratureDegree);
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      const Mat3 gz = evaluate(grad_u, q.points[k]) - a.gradient;
      grad_sq += q.weights[k] * gz.squaredNorm();
      eps_sq += q.weights[k] * sym(gz).squaredNorm();
      stress += q.weights[k] * (evaluate(ms.sigma, q.points[k]) - sig(q.points[k])).squaredNorm();
    }
    for (int i = 0; i < 4; ++i) {
      const int f = mesh.tet_facet(t, i);
      const Vec3 n = mesh.local_outward_normal(t, i);
      const Vec3 uh = facet_value(iuhat, f);
      const PhysicalRule fq = facet_rule(mesh, f, kMaxQuadratureDegree);
      Vec3 mean = Vec3::Zero();
      double area = 0.0;
      for (std::size_t k = 0; k < fq.points.size(); ++k) {
        const Vec3& x = fq.points[k];
        const double wt = fq.weights[k];
        const Vec3 ux = evaluate(ms.u, x);
        const Vec3 z = ux - a(x);
        const Vec3 zhat = tangential(ux, n) - uh;
        mean += wt * (tangential(z, n) - zhat);
        area += wt;
        const Vec3 curl_z = evaluate(ms.omega, x) - a.curl();
        const Vec3 theta = evaluate(ms.omega, x) - w(x);
        normal += h * wt * std::pow(n.dot(curl_z - theta), 2);
        const Mat3 ez = sym(evaluate(grad_u, x) - a.gradient);
        eps_nt += h * wt * tangential(ez * n, n).squaredNorm();
        const Mat3 ds = evaluate(ms.sigma, x) - sig(x);
        stress_nt += h * wt * tangential(ds * n, n).squaredNorm();
      }
      jump += mean.squaredNorm() / area / h;
    }
  }
  InterpolationErrors r;
  r.kinematic = std::sqrt((eps_sq + jump + normal) + (grad_sq + jump) + eps_nt);
  r.stress = std::sqrt(stress + stress_nt);
  return r;
}

}  // namespace divstokes
