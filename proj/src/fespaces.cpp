#include "divstokes/fespaces.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "divstokes/tensor.hpp"

namespace divstokes {

const char* to_string(SpaceTag s) {
  switch (s) {
    case SpaceTag::Vh: return "Vh";
    case SpaceTag::VhatH: return "VhatH";
    case SpaceTag::Wh: return "Wh";
    case SpaceTag::SigmaH: return "SigmaH";
    case SpaceTag::Qh: return "Qh";
  }
  return "?";
}

Vec3 AffineVector::curl() const { return curl_of_gradient(gradient); }

Mat3 AffineMatrix::operator()(const Vec3& x) const {
  const Vec3 d = x - origin;
  return value + d[0] * slope[0] + d[1] * slope[1] + d[2] * slope[2];
}

Vec3 AffineMatrix::divergence() const {
  Vec3 r;
  for (int i = 0; i < 3; ++i) r[i] = slope[0](i, 0) + slope[1](i, 1) + slope[2](i, 2);
  return r;
}

TetVertices tet_vertices(const Mesh& mesh, int t) {
  const auto& tv = mesh.tet(t);
  return {mesh.vertex(tv[0]), mesh.vertex(tv[1]), mesh.vertex(tv[2]), mesh.vertex(tv[3])};
}

namespace {

struct LocalGeometry {
  Mat3 jacobian;
  Mat3 inverse;
  double det = 0.0;
  std::array<Vec3, 4> normal;  // outward, facet i opposite vertex i
  std::array<double, 4> area{};
  std::array<Vec3, 4> facet_centroid;
};

LocalGeometry local_geometry(const TetVertices& v) {
  LocalGeometry g;
  for (int k = 0; k < 3; ++k) g.jacobian.col(k) = v[k + 1] - v[0];
  g.det = g.jacobian.determinant();
  double diam = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) diam = std::max(diam, (v[a] - v[b]).norm());
  if (!(std::abs(g.det) > 1e-12 * diam * diam * diam)) throw std::invalid_argument("degenerate tetrahedron");
  g.inverse = g.jacobian.inverse();
  for (int i = 0; i < 4; ++i) {
    auto lv = local_facet_vertices(i);
    const Vec3& a = v[lv[0]];
    Vec3 n = (v[lv[1]] - a).cross(v[lv[2]] - a);
    g.area[i] = 0.5 * n.norm();
    n.normalize();
    if (n.dot(v[i] - a) > 0) n = -n;
    g.normal[i] = n;
    g.facet_centroid[i] = (v[lv[0]] + v[lv[1]] + v[lv[2]]) / 3.0;
  }
  return g;
}

// Reference BDM1 functions (origin 0) dual to int_{F_i} v.n_i lambda_a ds.
const std::array<AffineVector, 12>& reference_bdm1() {
  static const std::array<AffineVector, 12> basis = [] {
    const TetVertices ref{Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
    const LocalGeometry g = local_geometry(ref);
    // Trial functions: e_c and e_c x_d, column 4 c + p with p = 0 constant, p = d + 1.
    Eigen::Matrix<double, 12, 12> moments;
    for (int i = 0; i < 4; ++i) {
      auto lv = local_facet_vertices(i);
      for (int k = 0; k < 3; ++k) {
        const int a = lv[k];
        // int_F lambda_a ds = |F| / 3, int_F lambda_a x ds = |F| / 12 sum_b (1 + delta_ab) x_b
        Vec3 first = Vec3::Zero();
        for (int b : lv) first += (b == a ? 2.0 : 1.0) * ref[b];
        first *= g.area[i] / 12.0;
        for (int c = 0; c < 3; ++c) {
          moments(3 * i + k, 4 * c) = g.normal[i][c] * g.area[i] / 3.0;
          for (int d = 0; d < 3; ++d) moments(3 * i + k, 4 * c + d + 1) = g.normal[i][c] * first[d];
        }
      }
    }
    const Eigen::Matrix<double, 12, 12> coeff = moments.inverse();
    std::array<AffineVector, 12> out;
    for (int j = 0; j < 12; ++j) {
      for (int c = 0; c < 3; ++c) {
        out[j].value[c] = coeff(4 * c, j);
        for (int d = 0; d < 3; ++d) out[j].gradient(c, d) = coeff(4 * c + d + 1, j);
      }
    }
    return out;
  }();
  return basis;
}

}  // namespace

std::array<AffineVector, 12> bdm1_local_basis(const TetVertices& v) {
  const LocalGeometry g = local_geometry(v);
  const auto& ref = reference_bdm1();
  std::array<AffineVector, 12> out;
  for (int j = 0; j < 12; ++j) {
    // Piola: phi(x) = J phihat(xhat) / det J, scaled to the |F|-normalized functional.
    const double s = g.area[j / 3] / g.det;
    out[j].origin = v[0];
    out[j].value = s * g.jacobian * ref[j].value;
    out[j].gradient = s * g.jacobian * ref[j].gradient * g.inverse;
  }
  return out;
}

std::array<AffineVector, 4> rt0_local_basis(const TetVertices& v) {
  const LocalGeometry g = local_geometry(v);
  const double volume = std::abs(g.det) / 6.0;
  std::array<AffineVector, 4> out;
  for (int i = 0; i < 4; ++i) {
    // |F_i| (x - v_i) / (3 |T|): unit normal trace on F_i, zero on the others
    const double s = g.area[i] / (3.0 * volume);
    out[i].origin = v[0];
    out[i].value = s * (v[0] - v[i]);
    out[i].gradient = s * Mat3::Identity();
  }
  return out;
}

std::array<Vec3, 2> vhat_local_basis(const FacetFrame& frame) { return {frame.tangent1, frame.tangent2}; }

const std::array<Mat3, 8>& deviatoric_basis() {
  static const std::array<Mat3, 8> basis = [] {
    std::array<Mat3, 8> b;
    const double r2 = std::sqrt(0.5);
    int k = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) {
        Mat3 s = Mat3::Zero(), w = Mat3::Zero();
        s(i, j) = s(j, i) = r2;
        w(i, j) = r2;
        w(j, i) = -r2;
        b[k++] = s;
        b[k++] = w;
      }
    b[6] = Vec3(r2, -r2, 0.0).asDiagonal();
    b[7] = (Vec3(1.0, 1.0, -2.0) / std::sqrt(6.0)).asDiagonal();
    return b;
  }();
  return basis;
}

std::array<std::array<Vec3, 2>, 4> sigma_facet_tangents(const TetVertices& v) {
  const LocalGeometry g = local_geometry(v);
  std::array<std::array<Vec3, 2>, 4> t;
  for (int i = 0; i < 4; ++i) {
    auto lv = local_facet_vertices(i);
    t[i][0] = (v[lv[1]] - v[lv[0]]).normalized();
    t[i][1] = g.normal[i].cross(t[i][0]);
  }
  return t;
}

Eigen::MatrixXd sigma_constraint_matrix(const TetVertices& v) {
  // Unknowns: tau = sum_a lambda_a D_a with D_a = sum_m c(8 a + m) E_m.
  const LocalGeometry g = local_geometry(v);
  const auto tangents = sigma_facet_tangents(v);
  const auto& E = deviatoric_basis();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(16, 32);
  int row = 0;
  for (int i = 0; i < 4; ++i) {
    auto lv = local_facet_vertices(i);
    for (int k = 0; k < 2; ++k) {
      const Vec3& t = tangents[i][k];
      const Vec3& n = g.normal[i];
      // nt-trace linear on F_i; constant iff its vertex values agree
      for (int other = 1; other < 3; ++other) {
        for (int m = 0; m < 8; ++m) {
          const double tn = t.dot(E[m] * n);
          c(row, 8 * lv[other] + m) += tn;
          c(row, 8 * lv[0] + m) -= tn;
        }
        ++row;
      }
    }
  }
  return c;
}

namespace {

Eigen::MatrixXd constraint_kernel(const Eigen::MatrixXd& c) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double tol = 1e-10 * std::max(1.0, s.size() ? s[0] : 0.0);
  int rank = 0;
  for (int k = 0; k < s.size(); ++k)
    if (s[k] > tol) ++rank;
  return svd.matrixV().rightCols(c.cols() - rank);
}

}  // namespace

int sigma_dimension() {
  static const int dim = [] {
    const TetVertices ref{Vec3::Zero(), Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
    return static_cast<int>(constraint_kernel(sigma_constraint_matrix(ref)).cols());
  }();
  return dim;
}

std::vector<AffineMatrix> sigma_local_basis(const TetVertices& v) {
  const LocalGeometry g = local_geometry(v);
  const auto tangents = sigma_facet_tangents(v);
  const auto& E = deviatoric_basis();
  const Eigen::MatrixXd kernel = constraint_kernel(sigma_constraint_matrix(v));
  const int dim = sigma_dimension();
  if (kernel.cols() != dim) throw std::runtime_error("sigma_local_basis: unexpected constraint rank");
  if (dim != 16) throw std::runtime_error("sigma_local_basis: stress space dimension differs from the moment count");

  // Functionals on the 32 raw coefficients.
  Eigen::MatrixXd func = Eigen::MatrixXd::Zero(16, 32);
  for (int i = 0; i < 4; ++i) {
    auto lv = local_facet_vertices(i);
    for (int k = 0; k < 2; ++k)
      for (int a : lv)
        for (int m = 0; m < 8; ++m) func(2 * i + k, 8 * a + m) = tangents[i][k].dot(E[m] * g.normal[i]) / 3.0;
  }
  for (int k = 0; k < 8; ++k)
    for (int a = 0; a < 4; ++a) func(8 + k, 8 * a + k) = 0.25;

  const Eigen::MatrixXd gram = func * kernel;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
  if (lu.rank() != 16) throw std::runtime_error("sigma_local_basis: singular moment matrix");
  const Eigen::MatrixXd coeff = kernel * lu.inverse();

  std::array<Vec3, 4> grad_lambda;
  for (int a = 1; a < 4; ++a) grad_lambda[a] = g.inverse.row(a - 1).transpose();
  grad_lambda[0] = -(grad_lambda[1] + grad_lambda[2] + grad_lambda[3]);

  std::vector<AffineMatrix> out(16);
  for (int j = 0; j < 16; ++j) {
    std::array<Mat3, 4> nodal;
    for (int a = 0; a < 4; ++a) {
      nodal[a].setZero();
      for (int m = 0; m < 8; ++m) nodal[a] += coeff(8 * a + m, j) * E[m];
    }
    AffineMatrix& f = out[j];
    f.origin = v[0];
    f.value = nodal[0];
    for (int k = 0; k < 3; ++k) {
      f.slope[k].setZero();
      for (int a = 0; a < 4; ++a) f.slope[k] += grad_lambda[a][k] * nodal[a];
    }
  }
  return out;
}

int DofMap::num_free() const {
  int n = 0;
  for (bool m : dirichlet_mask)
    if (!m) ++n;
  return n;
}

DofMap build_dofmap(const Mesh& mesh, SpaceTag space) {
  const int nt = static_cast<int>(mesh.num_tets());
  const int nf = static_cast<int>(mesh.num_facets());
  DofMap d;
  d.space = space;
  switch (space) {
    case SpaceTag::Vh: d.local_size = 12; d.n_global = 3 * nf; break;
    case SpaceTag::Wh: d.local_size = 4; d.n_global = nf; break;
    case SpaceTag::VhatH: d.local_size = 8; break;
    case SpaceTag::SigmaH: d.local_size = sigma_dimension(); d.n_global = nt * d.local_size; break;
    case SpaceTag::Qh: d.local_size = 1; d.n_global = nt; break;
  }

  std::vector<int> vhat_first;
  if (space == SpaceTag::VhatH) {
    vhat_first.assign(nf, -1);
    for (int f = 0; f < nf; ++f)
      if (mesh.facet_label(f) != FacetLabel::Dirichlet) {
        vhat_first[f] = d.n_global;
        d.n_global += 2;
      }
  }

  d.element_dofs.assign(static_cast<std::size_t>(nt) * d.local_size, -1);
  d.element_signs.assign(static_cast<std::size_t>(nt) * d.local_size, 1);
  d.dirichlet_mask.assign(d.n_global, false);

  for (int t = 0; t < nt; ++t) {
    int* dofs = d.element_dofs.data() + static_cast<std::size_t>(t) * d.local_size;
    std::int8_t* signs = d.element_signs.data() + static_cast<std::size_t>(t) * d.local_size;
    switch (space) {
      case SpaceTag::Vh:
        for (int i = 0; i < 4; ++i) {
          const int f = mesh.tet_facet(t, i);
          const auto& fv = mesh.facet(f);
          const auto lv = local_facet_vertices(i);
          const int s = mesh.facet_orientation(t, i);
          for (int k = 0; k < 3; ++k) {
            const int gv = mesh.tet(t)[lv[k]];
            int pos = 0;
            while (fv[pos] != gv) ++pos;
            dofs[3 * i + k] = 3 * f + pos;
            signs[3 * i + k] = static_cast<std::int8_t>(s);
          }
        }
        break;
      case SpaceTag::Wh:
        for (int i = 0; i < 4; ++i) {
          dofs[i] = mesh.tet_facet(t, i);
          signs[i] = static_cast<std::int8_t>(mesh.facet_orientation(t, i));
        }
        break;
      case SpaceTag::VhatH:
        for (int i = 0; i < 4; ++i) {
          const int first = vhat_first[mesh.tet_facet(t, i)];
          dofs[2 * i] = first < 0 ? -1 : first;
          dofs[2 * i + 1] = first < 0 ? -1 : first + 1;
        }
        break;
      case SpaceTag::SigmaH:
        for (int j = 0; j < d.local_size; ++j) dofs[j] = t * d.local_size + j;
        break;
      case SpaceTag::Qh:
        dofs[0] = t;
        break;
    }
  }

  if (space == SpaceTag::Vh || space == SpaceTag::Wh) {
    const int per = space == SpaceTag::Vh ? 3 : 1;
    for (int f = 0; f < nf; ++f)
      if (mesh.facet_label(f) == FacetLabel::Dirichlet)
        for (int k = 0; k < per; ++k) d.dirichlet_mask[per * f + k] = true;
  }
  return d;
}

FeSpaces::FeSpaces(const Mesh& mesh)
    : mesh_(&mesh),
      v_(build_dofmap(mesh, SpaceTag::Vh)),
      vhat_dofs_(build_dofmap(mesh, SpaceTag::VhatH)),
      w_(build_dofmap(mesh, SpaceTag::Wh)),
      sigma_dofs_(build_dofmap(mesh, SpaceTag::SigmaH)),
      q_(build_dofmap(mesh, SpaceTag::Qh)),
      sigma_dim_(sigma_dimension()) {
  auto number = [](const DofMap& d, std::vector<int>& index, int& count) {
    index.assign(d.n_global, -1);
    for (int g = 0; g < d.n_global; ++g)
      if (!d.dirichlet_mask[g]) index[g] = count++;
  };
  int count = 0;
  number(v_, layout_.v_index, count);
  layout_.n_v = count;
  number(vhat_dofs_, layout_.vhat_index, count);
  layout_.n_vhat = count - layout_.n_v;
  number(w_, layout_.w_index, count);
  layout_.n_w = count - layout_.n_v - layout_.n_vhat;

  const int nt = static_cast<int>(mesh.num_tets());
  bdm_.resize(nt);
  rt_.resize(nt);
  sigma_.resize(nt);
  for (int t = 0; t < nt; ++t) {
    const TetVertices tv = tet_vertices(mesh, t);
    bdm_[t] = bdm1_local_basis(tv);
    rt_[t] = rt0_local_basis(tv);
    sigma_[t] = sigma_local_basis(tv);
  }
  vhat_.resize(mesh.num_facets());
  for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f) vhat_[f] = vhat_local_basis(mesh.facet_frame(f));
}

const DofMap& FeSpaces::dofs(SpaceTag s) const {
  switch (s) {
    case SpaceTag::Vh: return v_;
    case SpaceTag::VhatH: return vhat_dofs_;
    case SpaceTag::Wh: return w_;
    case SpaceTag::SigmaH: return sigma_dofs_;
    case SpaceTag::Qh: break;
  }
  return q_;
}

void FeSpaces::kinematic_indices(int t, std::array<int, 24>& idx, std::array<double, 24>& sign) const {
  const int* vd = v_.dofs(t);
  const std::int8_t* vs = v_.signs(t);
  for (int k = 0; k < 12; ++k) {
    idx[k] = layout_.v_index[vd[k]];
    sign[k] = vs[k];
  }
  const int* hd = vhat_dofs_.dofs(t);
  for (int k = 0; k < 8; ++k) {
    idx[12 + k] = hd[k] < 0 ? -1 : layout_.vhat_index[hd[k]];
    sign[12 + k] = 1.0;
  }
  const int* wd = w_.dofs(t);
  const std::int8_t* ws = w_.signs(t);
  for (int k = 0; k < 4; ++k) {
    idx[20 + k] = layout_.w_index[wd[k]];
    sign[20 + k] = ws[k];
  }
}

}  // namespace divstokes
