#include "divstokes/mcs.hpp"

#include <stdexcept>

#include "divstokes/quadrature.hpp"
#include "divstokes/tensor.hpp"

namespace divstokes {

namespace {

void check(const McsParams& p) {
  if (!(p.nu > 0.0)) throw std::invalid_argument("McsParams: nu must be positive");
}

double frobenius(const Mat3& a, const Mat3& b) { return (a.array() * b.array()).sum(); }

PhysicalRule volume_rule(const Mesh& mesh, int t, int degree) {
  return map_to_tet(rule_for(3, degree), mesh.vertex(mesh.tet(t)[0]), mesh.element_geometry(t).jacobian);
}

PhysicalRule facet_rule(const Mesh& mesh, int f, int degree) {
  const auto& v = mesh.facet(f);
  return map_to_triangle(rule_for(2, degree), mesh.vertex(v[0]), mesh.vertex(v[1]), mesh.vertex(v[2]));
}

// Signed local kinematic coefficients of tet t from a reduced vector.
Eigen::Matrix<double, 24, 1> gather(const FeSpaces& fes, int t, const Eigen::VectorXd& x) {
  std::array<int, 24> idx;
  std::array<double, 24> sign;
  fes.kinematic_indices(t, idx, sign);
  Eigen::Matrix<double, 24, 1> xt;
  for (int k = 0; k < 24; ++k) xt[k] = idx[k] < 0 ? 0.0 : sign[k] * x[idx[k]];
  return xt;
}

}  // namespace

McsElement mcs_element(const FeSpaces& fes, int t, const McsParams& params) {
  check(params);
  const Mesh& mesh = fes.mesh();
  const auto& tau = fes.sigma(t);
  const auto& bdm = fes.bdm(t);
  const auto& rt = fes.rt(t);
  const int ns = static_cast<int>(tau.size());
  const double vol = mesh.element_geometry(t).volume;
  const Vec3 xt = mesh.tet_centroid(t);
  const PhysicalRule q = volume_rule(mesh, t, 2);

  McsElement e;
  e.mass = Eigen::MatrixXd::Zero(ns, ns);
  e.coupling = Eigen::MatrixXd::Zero(ns, 24);
  for (std::size_t k = 0; k < q.points.size(); ++k) {
    const Vec3& x = q.points[k];
    std::vector<Mat3> tx(ns);
    for (int i = 0; i < ns; ++i) tx[i] = tau[i](x);
    std::array<Mat3, 4> kap;
    for (int j = 0; j < 4; ++j) kap[j] = kappa(rt[j](x));
    for (int i = 0; i < ns; ++i) {
      for (int j = 0; j < ns; ++j) e.mass(i, j) += q.weights[k] * frobenius(tx[i], tx[j]);
      for (int j = 0; j < 4; ++j) e.coupling(i, 20 + j) += q.weights[k] * frobenius(tx[i], kap[j]);
    }
  }
  e.mass /= params.nu;

  // tau is affine and grad v constant; the nt-trace of tau is constant on each
  // facet, so facet integrals against affine v reduce to centroid values.
  for (int i = 0; i < ns; ++i) {
    const Mat3 tc = tau[i](xt);
    for (int k = 0; k < 12; ++k) e.coupling(i, k) -= vol * frobenius(tc, bdm[k].gradient);
    for (int l = 0; l < 4; ++l) {
      const FacetFrame fr = mesh.facet_frame(mesh.tet_facet(t, l));
      const Vec3 n = mesh.local_outward_normal(t, l);
      const Vec3 snt = tangential(tau[i](fr.centroid) * n, n);
      for (int k = 0; k < 12; ++k) e.coupling(i, k) += fr.area * snt.dot(bdm[k](fr.centroid));
      const auto& tang = fes.vhat_tangents(mesh.tet_facet(t, l));
      for (int m = 0; m < 2; ++m) e.coupling(i, 12 + 2 * l + m) -= fr.area * snt.dot(tang[m]);
    }
  }

  e.kinematic.setZero();
  const double h = element_weight(mesh, t, params.h_mode);
  for (int j = 0; j < 4; ++j)
    for (int l = 0; l < 4; ++l)
      e.kinematic(20 + j, 20 + l) = params.nu * h * h * vol * rt[j].divergence() * rt[l].divergence();
  if (params.add_divdiv)
    for (int k = 0; k < 12; ++k)
      for (int l = 0; l < 12; ++l)
        e.kinematic(k, l) = params.nu / 3.0 * vol * bdm[k].divergence() * bdm[l].divergence();
  return e;
}

McsSystem assemble_mcs(const FeSpaces& fes, const McsParams& params, const ManufacturedSolution& data) {
  check(params);
  const Mesh& mesh = fes.mesh();
  const int nt = static_cast<int>(mesh.num_tets());
  McsSystem s;
  s.fes = &fes;
  s.params = params;
  s.num_stress = fes.dofs(SpaceTag::SigmaH).n_global;
  s.num_kinematic = fes.layout().size();
  s.num_pressure = nt;
  const int ok = s.num_stress;
  const int op = ok + s.num_kinematic;

  std::vector<Triplet> e;
  std::array<int, 24> idx;
  std::array<double, 24> sign;
  s.elements.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    s.elements.push_back(mcs_element(fes, t, params));
    const McsElement& el = s.elements.back();
    const int* sd = fes.dofs(SpaceTag::SigmaH).dofs(t);
    const int ns = static_cast<int>(el.mass.rows());
    fes.kinematic_indices(t, idx, sign);
    for (int i = 0; i < ns; ++i) {
      for (int j = 0; j < ns; ++j) e.emplace_back(sd[i], sd[j], el.mass(i, j));
      for (int k = 0; k < 24; ++k) {
        if (idx[k] < 0 || el.coupling(i, k) == 0.0) continue;
        const double v = sign[k] * el.coupling(i, k);
        e.emplace_back(sd[i], ok + idx[k], v);
        e.emplace_back(ok + idx[k], sd[i], v);
      }
    }
    for (int k = 0; k < 24; ++k) {
      if (idx[k] < 0) continue;
      for (int l = 0; l < 24; ++l)
        if (idx[l] >= 0 && el.kinematic(k, l) != 0.0)
          e.emplace_back(ok + idx[k], ok + idx[l], -sign[k] * sign[l] * el.kinematic(k, l));
    }
  }
  const SparseMatrix d = assemble_divergence(fes);
  const auto& ds = d.storage();
  for (int i = 0; i < ds.outerSize(); ++i)
    for (SparseMatrix::Storage::InnerIterator it(ds, i); it; ++it) {
      e.emplace_back(ok + i, op + static_cast<int>(it.col()), -it.value());
      e.emplace_back(op + static_cast<int>(it.col()), ok + i, -it.value());
    }
  const int n = op + nt;
  s.full = SparseMatrix(n, n, e, true);
  s.load = assemble_load(fes, data);
  s.rhs = Eigen::VectorXd::Zero(n);
  s.rhs.segment(ok, s.num_kinematic) = -s.load;
  return s;
}

Eigen::Matrix<double, 24, 24> condensed_element(const McsElement& e) {
  Eigen::LLT<Eigen::MatrixXd> llt(e.mass);
  if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError("condense_stress: element stress mass is not SPD");
  return e.coupling.transpose() * llt.solve(e.coupling) + e.kinematic;
}

CondensedMcs condense_stress(const McsSystem& system) {
  const FeSpaces& fes = *system.fes;
  const int nt = static_cast<int>(fes.mesh().num_tets());
  CondensedMcs c;
  c.recovery.resize(nt);
  std::vector<Triplet> e;
  e.reserve(static_cast<std::size_t>(nt) * 24 * 24);
  std::array<int, 24> idx;
  std::array<double, 24> sign;
  for (int t = 0; t < nt; ++t) {
    const McsElement& el = system.elements[t];
    Eigen::LLT<Eigen::MatrixXd> llt(el.mass);
    if (llt.info() != Eigen::Success)
      throw NotPositiveDefiniteError("condense_stress: stress mass of element " + std::to_string(t) + " is not SPD");
    c.recovery[t] = llt.solve(el.coupling);
    const Eigen::Matrix<double, 24, 24> a = el.coupling.transpose() * c.recovery[t] + el.kinematic;
    fes.kinematic_indices(t, idx, sign);
    for (int k = 0; k < 24; ++k) {
      if (idx[k] < 0) continue;
      for (int l = 0; l < 24; ++l)
        if (idx[l] >= 0) e.emplace_back(idx[k], idx[l], sign[k] * sign[l] * a(k, l));
    }
  }
  SaddleSystem& r = c.reduced;
  r.fes = &fes;
  r.A = SparseMatrix(system.num_kinematic, system.num_kinematic, e, true);
  r.B = assemble_divergence(fes);
  r.rhs_kinematic = system.load;
  r.rhs_pressure = Eigen::VectorXd::Zero(system.num_pressure);
  return c;
}

SparseMatrix assemble_mcs_operator(const FeSpaces& fes, const McsParams& params) {
  check(params);
  const int nt = static_cast<int>(fes.mesh().num_tets());
  std::vector<Triplet> e;
  e.reserve(static_cast<std::size_t>(nt) * 24 * 24);
  std::array<int, 24> idx;
  std::array<double, 24> sign;
  for (int t = 0; t < nt; ++t) {
    const Eigen::Matrix<double, 24, 24> a = condensed_element(mcs_element(fes, t, params));
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

StokesSolution solve_mcs(const McsSystem& system) {
  const CondensedMcs c = condense_stress(system);
  StokesSolution s = solve_saddle(c.reduced);
  const FeSpaces& fes = *system.fes;
  const Eigen::VectorXd x = pack_kinematic(s.u, s.uhat, s.omega);
  DiscreteField sigma = zero_field(fes, SpaceTag::SigmaH);
  for (int t = 0; t < static_cast<int>(fes.mesh().num_tets()); ++t) {
    const Eigen::VectorXd st = -c.recovery[t] * gather(fes, t, x);
    const int* sd = fes.dofs(SpaceTag::SigmaH).dofs(t);
    for (int i = 0; i < st.size(); ++i) sigma.coeffs[sd[i]] = st[i];
  }
  s.sigma = std::move(sigma);
  return s;
}

StokesSolution solve_mcs_full(const McsSystem& system) {
  const FeSpaces& fes = *system.fes;
  StokesSolution s;
  const Eigen::VectorXd y = factor_solve(system.full, system.rhs, &s.stats);
  unpack_kinematic(fes, y.segment(system.num_stress, system.num_kinematic), s.u, s.uhat, s.omega);
  DiscreteField sigma = zero_field(fes, SpaceTag::SigmaH);
  sigma.coeffs = y.head(system.num_stress);
  s.sigma = std::move(sigma);
  s.p = zero_field(fes, SpaceTag::Qh);
  s.p.coeffs = y.tail(system.num_pressure);
  const DiscreteField d = divergence(s.u);
  s.div_max = d.coeffs.size() ? d.coeffs.cwiseAbs().maxCoeff() : 0.0;
  s.coeff_scale = s.u.coeffs.size() ? s.u.coeffs.cwiseAbs().maxCoeff() : 0.0;
  return s;
}

double stress_pairing(const DiscreteField& tau, const DiscreteField& v, const DiscreteField& vhat,
                      const DiscreteField& eta) {
  const Mesh& mesh = tau.fes->mesh();
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const AffineMatrix tt = local_matrix(tau, t);
    const AffineVector vt = local_vector(v, t);
    const AffineVector et = local_vector(eta, t);
    const Vec3 dt = tt.divergence();
    const PhysicalRule q = volume_rule(mesh, t, 2);
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      const Vec3& x = q.points[k];
      sum += q.weights[k] * (dt.dot(vt(x)) + frobenius(tt(x), kappa(et(x))));
    }
    for (int i = 0; i < 4; ++i) {
      const int f = mesh.tet_facet(t, i);
      const Vec3 n = mesh.local_outward_normal(t, i);
      const Vec3 vh = facet_value(vhat, f);
      const PhysicalRule s = facet_rule(mesh, f, 2);
      for (std::size_t k = 0; k < s.points.size(); ++k) {
        const Vec3& x = s.points[k];
        const Vec3 sn = tt(x) * n;
        sum -= s.weights[k] * (sn.dot(n) * vt(x).dot(n) + tangential(sn, n).dot(vh));
      }
    }
  }
  return sum;
}

double stress_pairing_compact(const DiscreteField& tau, const DiscreteField& v, const DiscreteField& vhat,
                              const DiscreteField& eta) {
  const Mesh& mesh = tau.fes->mesh();
  double sum = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const AffineMatrix tt = local_matrix(tau, t);
    const AffineVector vt = local_vector(v, t);
    const AffineVector et = local_vector(eta, t);
    const PhysicalRule q = volume_rule(mesh, t, 2);
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      const Vec3& x = q.points[k];
      sum -= q.weights[k] * frobenius(tt(x), vt.gradient - kappa(et(x)));
    }
    for (int i = 0; i < 4; ++i) {
      const int f = mesh.tet_facet(t, i);
      const Vec3 n = mesh.local_outward_normal(t, i);
      const Vec3 vh = facet_value(vhat, f);
      const PhysicalRule s = facet_rule(mesh, f, 2);
      for (std::size_t k = 0; k < s.points.size(); ++k) {
        const Vec3& x = s.points[k];
        sum += s.weights[k] * tangential(tt(x) * n, n).dot(tangential(vt(x) - vh, n));
      }
    }
  }
  return sum;
}

}  // namespace divstokes
