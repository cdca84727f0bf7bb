#ifndef DIVSTOKES_MESH_HPP
#define DIVSTOKES_MESH_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace divstokes {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class FacetLabel { Interior, Dirichlet, Neumann };

/// One of the six faces of the unit cube, e.g. {axis = 0, side = 0} is x = 0.
struct CubeFace {
  int axis = 0;
  int side = 0;

  bool contains(const Vec3& p, double tol = 1e-12) const;
  Vec3 outward_normal() const;
};

/// Side of an interior or boundary facet as seen from an adjacent tet.
struct FacetSide {
  int tet = -1;
  int local = -1;  ///< local facet index in the tet (facet i is opposite vertex i)
};

struct ElementGeometry {
  Mat3 jacobian;  ///< maps the reference tet onto the element, x = v0 + J xhat
  double volume = 0.0;
  double diameter = 0.0;
};

struct FacetFrame {
  Vec3 normal;
  Vec3 tangent1;
  Vec3 tangent2;
  double area = 0.0;
  Vec3 centroid;
};

/// Conforming tetrahedral mesh with enumerated, oriented and labeled facets.
///
/// Tets are stored with a vertex ordering of positive orientation. Facets are
/// stored as ascending vertex triples. An interior facet's normal points from
/// its lower-index tet to the higher-index one, a boundary facet's normal
/// points out of the domain.
class Mesh {
public:
  using Labeler = std::function<FacetLabel(const Vec3& centroid, const Vec3& outward_normal)>;

  Mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets, const Labeler& boundary_label);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_tets() const { return tets_.size(); }
  std::size_t num_facets() const { return facets_.size(); }
  std::size_t num_boundary_facets() const;

  const Vec3& vertex(int v) const { return vertices_[v]; }
  const std::array<int, 4>& tet(int t) const { return tets_[t]; }
  const std::array<int, 3>& facet(int f) const { return facets_[f]; }
  /// Global facet index of local facet `i` of tet `t`.
  int tet_facet(int t, int i) const { return tet_facets_[t][i]; }
  /// One entry for boundary facets, two (ascending tet index) for interior ones.
  const std::vector<FacetSide>& facet_sides(int f) const { return facet_to_tets_[f]; }
  FacetLabel facet_label(int f) const { return facet_label_[f]; }
  const Vec3& facet_normal(int f) const { return facet_normal_[f]; }
  double facet_diameter(int f) const { return h_facet_[f]; }
  double h_max() const { return h_max_; }

  /// +1 if the outward normal of local facet i of tet t agrees with the stored facet normal.
  int facet_orientation(int t, int i) const;

  ElementGeometry element_geometry(int t) const;
  FacetFrame facet_frame(int f) const;
  Vec3 tet_centroid(int t) const;
  /// Outward unit normal of local facet i of tet t.
  Vec3 local_outward_normal(int t, int i) const;

private:
  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 4>> tets_;
  std::vector<std::array<int, 3>> facets_;
  std::vector<std::array<int, 4>> tet_facets_;
  std::vector<std::vector<FacetSide>> facet_to_tets_;
  std::vector<FacetLabel> facet_label_;
  std::vector<Vec3> facet_normal_;
  std::vector<double> h_facet_;
  double h_max_ = 0.0;
};

/// Kuhn triangulation of (0,1)^3 with n^3 sub-cubes, six tets each. Boundary
/// facets on `neumann_face` are labeled Neumann, all others Dirichlet.
Mesh build_structured_cube(int n, CubeFace neumann_face = {0, 0});

/// Same vertices and tets with boundary labels from `labeler`.
Mesh relabeled(const Mesh& mesh, const Mesh::Labeler& labeler);

/// Reads the ASCII format: "nv nt", nv lines "x y z", nt lines "v0 v1 v2 v3",
/// then optional lines "a b c label" for boundary facets with label one of
/// D, N, dirichlet, neumann (unlisted boundary facets default to Dirichlet).
Mesh read_ascii_mesh(std::istream& in);

const char* to_string(FacetLabel label);

/// Local vertex indices of local facet i (ascending, i excluded).
std::array<int, 3> local_facet_vertices(int i);

}  // namespace divstokes

#endif
