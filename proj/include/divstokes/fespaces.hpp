#ifndef DIVSTOKES_FESPACES_HPP
#define DIVSTOKES_FESPACES_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "divstokes/mesh.hpp"

namespace divstokes {

enum class SpaceTag { Vh, VhatH, Wh, SigmaH, Qh };

const char* to_string(SpaceTag s);

/// x -> value + gradient (x - origin).
struct AffineVector {
  Vec3 origin = Vec3::Zero();
  Vec3 value = Vec3::Zero();
  Mat3 gradient = Mat3::Zero();

  Vec3 operator()(const Vec3& x) const { return value + gradient * (x - origin); }
  double divergence() const { return gradient.trace(); }
  Vec3 curl() const;
  Mat3 sym_gradient() const { return 0.5 * (gradient + gradient.transpose()); }
};

/// x -> value + sum_k slope[k] (x - origin)_k.
struct AffineMatrix {
  Vec3 origin = Vec3::Zero();
  Mat3 value = Mat3::Zero();
  std::array<Mat3, 3> slope{Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};

  Mat3 operator()(const Vec3& x) const;
  /// Row-wise divergence (constant).
  Vec3 divergence() const;
};

using TetVertices = std::array<Vec3, 4>;

TetVertices tet_vertices(const Mesh& mesh, int t);

/// BDM1 basis, 12 functions, ordered 3 * (local facet) + k where k runs over
/// the facet's vertices in ascending local index. Function (i, a) is dual to
/// v -> |F_i|^{-1} int_{F_i} v.n_i lambda_a ds with n_i the outward normal.
/// Built as the contravariant Piola image of a reference dual basis.
std::array<AffineVector, 12> bdm1_local_basis(const TetVertices& v);

/// RT0 basis, function i dual to v -> |F_i|^{-1} int_{F_i} v.n_i ds.
std::array<AffineVector, 4> rt0_local_basis(const TetVertices& v);

/// Two unit tangents spanning the facet plane.
std::array<Vec3, 2> vhat_local_basis(const FacetFrame& frame);

/// Local stress basis: P1 trace-free matrices with facet-constant nt-trace.
/// Function j is dual to the j-th of these functionals:
///   j = 2 i + m (i < 4, m < 2): t_{i,m} . tau(x_{F_i}) n_i, the facet
///   average of the nt-trace against the tangent t_{i,m} of local facet i
///   (t_{i,0} along the edge from its first to second vertex);
///   j = 8 + k: tau(x_T) : D_k, element average against deviatoric_basis()[k].
/// Throws if the constraint rank or the moment matrix is not as expected.
std::vector<AffineMatrix> sigma_local_basis(const TetVertices& v);

/// Orthonormal basis of the trace-free 3x3 matrices (Frobenius product).
const std::array<Mat3, 8>& deviatoric_basis();

/// Local facet tangents used by the stress functionals, in the order above.
std::array<std::array<Vec3, 2>, 4> sigma_facet_tangents(const TetVertices& v);

/// Nullspace dimension of the nt-constancy constraints on P1(T, D), measured
/// on the reference tet and cached.
int sigma_dimension();

/// Raw constraint matrix (rows = constraints, cols = 32 vertex-nodal
/// deviatoric coefficients) whose kernel is the stress space on the element.
Eigen::MatrixXd sigma_constraint_matrix(const TetVertices& v);

/// Global numbering for one space. Facet dofs carry an orientation sign in
/// element_signs; a global index of -1 marks a slot without a global dof
/// (VhatH on Dirichlet facets).
struct DofMap {
  SpaceTag space = SpaceTag::Qh;
  int n_global = 0;
  int local_size = 0;
  std::vector<int> element_dofs;       ///< num_tets * local_size
  std::vector<std::int8_t> element_signs;  ///< num_tets * local_size
  std::vector<bool> dirichlet_mask;    ///< n_global

  const int* dofs(int t) const { return element_dofs.data() + static_cast<std::size_t>(t) * local_size; }
  const std::int8_t* signs(int t) const { return element_signs.data() + static_cast<std::size_t>(t) * local_size; }
  int num_free() const;
};

DofMap build_dofmap(const Mesh& mesh, SpaceTag space);

/// Index maps from global dofs of each kinematic space to the reduced layout
/// [Vh free | VhatH | Wh free]; -1 for Dirichlet-masked dofs.
struct KinematicLayout {
  std::vector<int> v_index;
  std::vector<int> vhat_index;
  std::vector<int> w_index;
  int n_v = 0;
  int n_vhat = 0;
  int n_w = 0;

  int size() const { return n_v + n_vhat + n_w; }
};

/// Mesh, dof maps and cached local bases shared by assembly, interpolation
/// and the studies. Immutable after construction.
class FeSpaces {
public:
  explicit FeSpaces(const Mesh& mesh);

  const Mesh& mesh() const { return *mesh_; }
  const DofMap& dofs(SpaceTag s) const;
  const KinematicLayout& layout() const { return layout_; }

  const std::array<AffineVector, 12>& bdm(int t) const { return bdm_[t]; }
  const std::array<AffineVector, 4>& rt(int t) const { return rt_[t]; }
  const std::vector<AffineMatrix>& sigma(int t) const { return sigma_[t]; }
  const std::array<Vec3, 2>& vhat_tangents(int f) const { return vhat_[f]; }
  int sigma_dim() const { return sigma_dim_; }

  /// The 24 reduced indices (12 Vh, 8 VhatH, 4 Wh) of tet t, -1 for masked
  /// slots, and the matching signs.
  void kinematic_indices(int t, std::array<int, 24>& idx, std::array<double, 24>& sign) const;

private:
  const Mesh* mesh_;
  DofMap v_, vhat_dofs_, w_, sigma_dofs_, q_;
  KinematicLayout layout_;
  std::vector<std::array<AffineVector, 12>> bdm_;
  std::vector<std::array<AffineVector, 4>> rt_;
  std::vector<std::vector<AffineMatrix>> sigma_;
  std::vector<std::array<Vec3, 2>> vhat_;
  int sigma_dim_ = 0;
};

}  // namespace divstokes

#endif
