#include "divstokes/system.hpp"

#include <cmath>
#include <stdexcept>

#include "divstokes/quadrature.hpp"

namespace divstokes {

const char* to_string(HMode m) {
  switch (m) {
    case HMode::Element: return "element";
    case HMode::PerFacet: return "per_facet";
    case HMode::Global: return "global";
  }
  return "?";
}

HMode parse_hmode(const std::string& name) {
  for (HMode m : {HMode::Element, HMode::PerFacet, HMode::Global})
    if (name == to_string(m)) return m;
  throw std::invalid_argument("unknown h mode '" + name + "' (expected element, per_facet or global)");
}

namespace {

double element_size(const Mesh& mesh, int t) { return std::cbrt(6.0 * mesh.element_geometry(t).volume); }

}  // namespace

double facet_weight(const Mesh& mesh, int t, int f, HMode mode) {
  switch (mode) {
    case HMode::Element: return element_size(mesh, t);
    case HMode::PerFacet: return mesh.facet_diameter(f);
    case HMode::Global: return mesh.h_max();
  }
  return 0.0;
}

double element_weight(const Mesh& mesh, int t, HMode mode) {
  switch (mode) {
    case HMode::Element: return element_size(mesh, t);
    case HMode::PerFacet: return mesh.element_geometry(t).diameter;
    case HMode::Global: return mesh.h_max();
  }
  return 0.0;
}

SparseMatrix SaddleSystem::saddle() const {
  const int nk = num_kinematic();
  const int np = num_pressure();
  std::vector<Triplet> e;
  e.reserve(A.nonzeros() + 2 * B.nonzeros());
  const auto& a = A.storage();
  for (int i = 0; i < a.outerSize(); ++i)
    for (SparseMatrix::Storage::InnerIterator it(a, i); it; ++it) e.emplace_back(i, static_cast<int>(it.col()), it.value());
  const auto& b = B.storage();
  for (int i = 0; i < b.outerSize(); ++i)
    for (SparseMatrix::Storage::InnerIterator it(b, i); it; ++it) {
      e.emplace_back(i, nk + static_cast<int>(it.col()), it.value());
      e.emplace_back(nk + static_cast<int>(it.col()), i, it.value());
    }
  return SparseMatrix(nk + np, nk + np, e, true);
}

Eigen::VectorXd SaddleSystem::saddle_rhs() const {
  Eigen::VectorXd r(num_kinematic() + num_pressure());
  r << rhs_kinematic, rhs_pressure;
  return r;
}

Eigen::VectorXd assemble_load(const FeSpaces& fes, const ManufacturedSolution& data) {
  const Mesh& mesh = fes.mesh();
  const KinematicLayout& layout = fes.layout();
  // Long double accumulation: the viscous part of the load can be orders of
  // magnitude below a gradient part that the discrete pressure absorbs.
  std::vector<long double> rhs(layout.size(), 0.0L);
  const int fdeg = std::max(degree(data.f), 0);
  const QuadRule& vol = rule_for(3, std::min(fdeg + 1, kMaxQuadratureDegree));
  std::array<int, 24> idx;
  std::array<double, 24> sign;
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    fes.kinematic_indices(t, idx, sign);
    const auto& basis = fes.bdm(t);
    const PhysicalRule q = map_to_tet(vol, mesh.vertex(mesh.tet(t)[0]), mesh.element_geometry(t).jacobian);
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      const Vec3 f = evaluate(data.f, q.points[k]);
      for (int j = 0; j < 12; ++j)
        if (idx[j] >= 0) rhs[idx[j]] += sign[j] * q.weights[k] * static_cast<long double>(f.dot(basis[j](q.points[k])));
    }
  }

  // Neumann facets: sigma and p enter only through their traces.
  const int sdeg = std::max(degree(data.sigma), data.pressure.degree());
  const QuadRule& surf = rule_for(2, std::clamp(sdeg + 1, 0, kMaxQuadratureDegree));
  for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f) {
    if (mesh.facet_label(f) != FacetLabel::Neumann) continue;
    const FacetSide side = mesh.facet_sides(f)[0];
    fes.kinematic_indices(side.tet, idx, sign);
    const Vec3& n = mesh.facet_normal(f);  // outward on the boundary
    const auto& fv = mesh.facet(f);
    const PhysicalRule q = map_to_triangle(surf, mesh.vertex(fv[0]), mesh.vertex(fv[1]), mesh.vertex(fv[2]));
    const auto& basis = fes.bdm(side.tet);
    const auto& tangents = fes.vhat_tangents(f);
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      const Vec3& x = q.points[k];
      const Mat3 sigma = evaluate(data.sigma, x);
      const Vec3 sn = sigma * n;
      const double snn = n.dot(sn);
      const double g_nn = snn - data.pressure(x);
      const Vec3 g_nt = sn - snn * n;
      for (int a = 0; a < 3; ++a) {
        const int j = 3 * side.local + a;
        if (idx[j] >= 0) rhs[idx[j]] += sign[j] * q.weights[k] * static_cast<long double>(g_nn * basis[j](x).dot(n));
      }
      for (int m = 0; m < 2; ++m) {
        const int j = 12 + 2 * side.local + m;
        if (idx[j] >= 0) rhs[idx[j]] += q.weights[k] * static_cast<long double>(g_nt.dot(tangents[m]));
      }
    }
  }
  Eigen::VectorXd out(layout.size());
  for (int i = 0; i < layout.size(); ++i) out[i] = static_cast<double>(rhs[i]);
  return out;
}

SparseMatrix assemble_divergence(const FeSpaces& fes) {
  const Mesh& mesh = fes.mesh();
  std::vector<Triplet> e;
  std::array<int, 24> idx;
  std::array<double, 24> sign;
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    fes.kinematic_indices(t, idx, sign);
    const double vol = mesh.element_geometry(t).volume;
    const auto& basis = fes.bdm(t);
    for (int j = 0; j < 12; ++j)
      if (idx[j] >= 0) e.emplace_back(idx[j], t, -sign[j] * vol * basis[j].divergence());
  }
  return SparseMatrix(fes.layout().size(), static_cast<int>(mesh.num_tets()), e, false);
}

StokesSolution solve_saddle(const SaddleSystem& system) {
  const FeSpaces& fes = *system.fes;
  StokesSolution s;
  const SparseMatrix k = system.saddle();
  const Eigen::VectorXd b = system.saddle_rhs();
  const Eigen::VectorXd x = factor_solve(k, b, &s.stats);
  const int nk = system.num_kinematic();
  unpack_kinematic(fes, x.head(nk), s.u, s.uhat, s.omega);
  s.p = zero_field(fes, SpaceTag::Qh);
  s.p.coeffs = x.tail(system.num_pressure());
  const DiscreteField d = divergence(s.u);
  s.div_max = d.coeffs.size() ? d.coeffs.cwiseAbs().maxCoeff() : 0.0;
  s.coeff_scale = s.u.coeffs.size() ? s.u.coeffs.cwiseAbs().maxCoeff() : 0.0;
  return s;
}

}  // namespace divstokes
