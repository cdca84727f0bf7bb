#include "divstokes/hdg.hpp"

#include <stdexcept>

#include "divstokes/quadrature.hpp"
#include "divstokes/tensor.hpp"

namespace divstokes {

namespace {

void check(const HdgParams& p) {
  if (!(p.alpha > 0.0)) throw std::invalid_argument("HdgParams: alpha must be positive");
  if (!(p.nu > 0.0)) throw std::invalid_argument("HdgParams: nu must be positive");
}

}  // namespace

ElementMatrix24 hdg_element_matrix(const FeSpaces& fes, int t, const HdgParams& params) {
  const Mesh& mesh = fes.mesh();
  const auto& bdm = fes.bdm(t);
  const auto& rt = fes.rt(t);
  const double vol = mesh.element_geometry(t).volume;

  std::array<Mat3, 12> eps;
  std::array<Vec3, 12> curl;
  for (int k = 0; k < 12; ++k) {
    eps[k] = bdm[k].sym_gradient();
    curl[k] = bdm[k].curl();
  }

  ElementMatrix24 a = ElementMatrix24::Zero();
  for (int k = 0; k < 12; ++k)
    for (int l = 0; l < 12; ++l) a(k, l) = vol * (eps[k].array() * eps[l].array()).sum();

  for (int i = 0; i < 4; ++i) {
    const int f = mesh.tet_facet(t, i);
    const FacetFrame fr = mesh.facet_frame(f);
    const Vec3 n = mesh.local_outward_normal(t, i);
    const double h = facet_weight(mesh, t, f, params.h_mode);
    const auto& tang = fes.vhat_tangents(f);

    // Columns map local coefficients to eps(z) n, Pi0 (zhat - z)_t and (curl z - theta).n.
    Eigen::Matrix<double, 3, 24> en = Eigen::Matrix<double, 3, 24>::Zero();
    Eigen::Matrix<double, 3, 24> jump = Eigen::Matrix<double, 3, 24>::Zero();
    Eigen::Matrix<double, 1, 24> curl_n = Eigen::Matrix<double, 1, 24>::Zero();
    for (int k = 0; k < 12; ++k) {
      en.col(k) = eps[k] * n;
      jump.col(k) = -tangential(bdm[k](fr.centroid), n);
      curl_n(k) = curl[k].dot(n);
    }
    for (int m = 0; m < 2; ++m) jump.col(12 + 2 * i + m) = tang[m];
    for (int j = 0; j < 4; ++j) curl_n(20 + j) = -rt[j](fr.centroid).dot(n);

    a += fr.area * (en.transpose() * jump + jump.transpose() * en);
    a += (params.alpha / h) * fr.area * jump.transpose() * jump;
    a += h * fr.area * curl_n.transpose() * curl_n;
  }
  return params.nu * a;
}

SparseMatrix assemble_hdg_operator(const FeSpaces& fes, const HdgParams& params) {
  check(params);
  const Mesh& mesh = fes.mesh();
  std::vector<Triplet> e;
  e.reserve(mesh.num_tets() * 24 * 24);
  std::array<int, 24> idx;
  std::array<double, 24> sign;
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const ElementMatrix24 a = hdg_element_matrix(fes, t, params);
    fes.kinematic_indices(t, idx, sign);
    for (int k = 0; k < 24; ++k) {
      if (idx[k] < 0) continue;
      for (int l = 0; l < 24; ++l)
        if (idx[l] >= 0) e.emplace_back(idx[k], idx[l], sign[k] * sign[l] * a(k, l));
    }
  }
  const int n = fes.layout().size();
  return SparseMatrix(n, n, e, true);
}

SaddleSystem assemble_hdg(const FeSpaces& fes, const HdgParams& params, const ManufacturedSolution& data) {
  SaddleSystem s;
  s.fes = &fes;
  s.A = assemble_hdg_operator(fes, params);
  s.B = assemble_divergence(fes);
  s.rhs_kinematic = assemble_load(fes, data);
  s.rhs_pressure = Eigen::VectorXd::Zero(static_cast<int>(fes.mesh().num_tets()));
  return s;
}

double hdg_energy(const DiscreteField& u, const DiscreteField& uhat, const DiscreteField& omega,
                  const HdgParams& params) {
  check(params);
  const FeSpaces& fes = *u.fes;
  const Mesh& mesh = fes.mesh();
  const QuadRule& vol_rule = rule_for(3, 2);
  const QuadRule& surf_rule = rule_for(2, 2);
  double energy = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const AffineVector ut = local_vector(u, t);
    const AffineVector wt = local_vector(omega, t);
    const auto g = mesh.element_geometry(t);
    const PhysicalRule vq = map_to_tet(vol_rule, mesh.vertex(mesh.tet(t)[0]), g.jacobian);
    const Mat3 e = ut.sym_gradient();
    for (std::size_t k = 0; k < vq.points.size(); ++k) energy += vq.weights[k] * (e.array() * e.array()).sum();
    for (int i = 0; i < 4; ++i) {
      const int f = mesh.tet_facet(t, i);
      const Vec3 n = mesh.local_outward_normal(t, i);
      const double h = facet_weight(mesh, t, f, params.h_mode);
      const auto& fv = mesh.facet(f);
      const PhysicalRule sq = map_to_triangle(surf_rule, mesh.vertex(fv[0]), mesh.vertex(fv[1]), mesh.vertex(fv[2]));
      const Vec3 uh = facet_value(uhat, f);
      Vec3 avg = Vec3::Zero();
      double area = 0.0;
      for (std::size_t k = 0; k < sq.points.size(); ++k) {
        const Vec3& x = sq.points[k];
        const Vec3 jump = tangential(uh - ut(x), n);
        const double c = (ut.curl() - wt(x)).dot(n);
        energy += sq.weights[k] * (2.0 * (e * n).dot(jump) + h * c * c);
        avg += sq.weights[k] * jump;
        area += sq.weights[k];
      }
      avg /= area;
      energy += params.alpha / h * area * avg.squaredNorm();
    }
  }
  return params.nu * energy;
}

StokesSolution solve_hdg(const SaddleSystem& system) { return solve_saddle(system); }

}  // namespace divstokes
