#include "divstokes/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace divstokes {

std::array<int, 3> local_facet_vertices(int i) {
  switch (i) {
    case 0: return {1, 2, 3};
    case 1: return {0, 2, 3};
    case 2: return {0, 1, 3};
    default: return {0, 1, 2};
  }
}

namespace {

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

std::array<int, 3> sorted_triple(int a, int b, int c) {
  std::array<int, 3> s{a, b, c};
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

bool CubeFace::contains(const Vec3& p, double tol) const {
  return std::abs(p[axis] - static_cast<double>(side)) <= tol;
}

Vec3 CubeFace::outward_normal() const {
  Vec3 n = Vec3::Zero();
  n[axis] = side == 0 ? -1.0 : 1.0;
  return n;
}

const char* to_string(FacetLabel label) {
  switch (label) {
    case FacetLabel::Interior: return "interior";
    case FacetLabel::Dirichlet: return "dirichlet";
    case FacetLabel::Neumann: return "neumann";
  }
  return "?";
}

Mesh::Mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets, const Labeler& boundary_label)
    : vertices_(std::move(vertices)), tets_(std::move(tets)) {
  const int nv = static_cast<int>(vertices_.size());
  for (auto& t : tets_) {
    for (int v : t)
      if (v < 0 || v >= nv) throw std::invalid_argument("Mesh: tet references a nonexistent vertex");
    double vol = signed_volume(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]], vertices_[t[3]]);
    if (std::abs(vol) < 1e-300) throw std::invalid_argument("Mesh: degenerate tet");
    if (vol < 0) std::swap(t[2], t[3]);
  }

  std::map<std::array<int, 3>, int> facet_index;
  tet_facets_.resize(tets_.size());
  for (int t = 0; t < static_cast<int>(tets_.size()); ++t) {
    for (int i = 0; i < 4; ++i) {
      auto lv = local_facet_vertices(i);
      auto key = sorted_triple(tets_[t][lv[0]], tets_[t][lv[1]], tets_[t][lv[2]]);
      auto [it, inserted] = facet_index.try_emplace(key, static_cast<int>(facets_.size()));
      if (inserted) {
        facets_.push_back(key);
        facet_to_tets_.emplace_back();
      }
      tet_facets_[t][i] = it->second;
      facet_to_tets_[it->second].push_back({t, i});
      if (facet_to_tets_[it->second].size() > 2) throw std::invalid_argument("Mesh: facet shared by more than two tets");
    }
  }

  const int nf = static_cast<int>(facets_.size());
  facet_label_.resize(nf);
  facet_normal_.resize(nf);
  h_facet_.resize(nf);
  for (int f = 0; f < nf; ++f) {
    // tets were visited in ascending order, so sides are sorted by tet index
    const FacetSide& owner = facet_to_tets_[f].front();
    facet_normal_[f] = local_outward_normal(owner.tet, owner.local);
    const auto& fv = facets_[f];
    double d = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) d = std::max(d, (vertices_[fv[a]] - vertices_[fv[b]]).norm());
    h_facet_[f] = d;
    if (facet_to_tets_[f].size() == 2) {
      facet_label_[f] = FacetLabel::Interior;
    } else {
      Vec3 c = (vertices_[fv[0]] + vertices_[fv[1]] + vertices_[fv[2]]) / 3.0;
      FacetLabel l = boundary_label(c, facet_normal_[f]);
      if (l == FacetLabel::Interior) throw std::invalid_argument("Mesh: boundary facet labeled interior");
      facet_label_[f] = l;
    }
  }

  for (int t = 0; t < static_cast<int>(tets_.size()); ++t) h_max_ = std::max(h_max_, element_geometry(t).diameter);
}

std::size_t Mesh::num_boundary_facets() const {
  return static_cast<std::size_t>(std::count_if(facet_label_.begin(), facet_label_.end(),
                                                [](FacetLabel l) { return l != FacetLabel::Interior; }));
}

Vec3 Mesh::local_outward_normal(int t, int i) const {
  const auto& tv = tets_[t];
  auto lv = local_facet_vertices(i);
  const Vec3& a = vertices_[tv[lv[0]]];
  Vec3 n = (vertices_[tv[lv[1]]] - a).cross(vertices_[tv[lv[2]]] - a);
  n.normalize();
  if (n.dot(vertices_[tv[i]] - a) > 0) n = -n;
  return n;
}

int Mesh::facet_orientation(int t, int i) const {
  return local_outward_normal(t, i).dot(facet_normal_[tet_facets_[t][i]]) > 0 ? 1 : -1;
}

ElementGeometry Mesh::element_geometry(int t) const {
  const auto& tv = tets_[t];
  ElementGeometry g;
  for (int k = 0; k < 3; ++k) g.jacobian.col(k) = vertices_[tv[k + 1]] - vertices_[tv[0]];
  g.volume = std::abs(g.jacobian.determinant()) / 6.0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) g.diameter = std::max(g.diameter, (vertices_[tv[a]] - vertices_[tv[b]]).norm());
  return g;
}

FacetFrame Mesh::facet_frame(int f) const {
  const auto& fv = facets_[f];
  const Vec3& p0 = vertices_[fv[0]];
  const Vec3& p1 = vertices_[fv[1]];
  const Vec3& p2 = vertices_[fv[2]];
  FacetFrame fr;
  fr.normal = facet_normal_[f];
  fr.tangent1 = (p1 - p0).normalized();
  fr.tangent2 = fr.normal.cross(fr.tangent1);
  fr.area = 0.5 * (p1 - p0).cross(p2 - p0).norm();
  fr.centroid = (p0 + p1 + p2) / 3.0;
  return fr;
}

Vec3 Mesh::tet_centroid(int t) const {
  const auto& tv = tets_[t];
  return 0.25 * (vertices_[tv[0]] + vertices_[tv[1]] + vertices_[tv[2]] + vertices_[tv[3]]);
}

Mesh build_structured_cube(int n, CubeFace neumann_face) {
  if (n < 1) throw std::invalid_argument("build_structured_cube: n must be at least 1");
  if (neumann_face.axis < 0 || neumann_face.axis > 2 || (neumann_face.side != 0 && neumann_face.side != 1))
    throw std::invalid_argument("build_structured_cube: invalid cube face");

  const int m = n + 1;
  auto vid = [m](int i, int j, int k) { return i + m * (j + m * k); };
  std::vector<Vec3> verts;
  verts.reserve(static_cast<std::size_t>(m) * m * m);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) verts.emplace_back(double(i) / n, double(j) / n, double(k) / n);

  // each tet follows a monotone lattice path from the cell's low corner to its
  // high corner, one per axis permutation; all six share the main diagonal
  static constexpr std::array<std::array<int, 3>, 6> perms{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<std::array<int, 4>> tets;
  tets.reserve(6 * static_cast<std::size_t>(n) * n * n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (const auto& p : perms) {
          std::array<int, 3> c{i, j, k};
          std::array<int, 4> t{};
          t[0] = vid(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[p[s]];
            t[s + 1] = vid(c[0], c[1], c[2]);
          }
          tets.push_back(t);
        }

  return Mesh(std::move(verts), std::move(tets), [neumann_face](const Vec3& c, const Vec3&) {
    return neumann_face.contains(c) ? FacetLabel::Neumann : FacetLabel::Dirichlet;
  });
}

Mesh relabeled(const Mesh& mesh, const Mesh::Labeler& labeler) {
  std::vector<Vec3> verts(mesh.num_vertices());
  for (std::size_t i = 0; i < verts.size(); ++i) verts[i] = mesh.vertex(static_cast<int>(i));
  std::vector<std::array<int, 4>> tets(mesh.num_tets());
  for (std::size_t t = 0; t < tets.size(); ++t) tets[t] = mesh.tet(static_cast<int>(t));
  return Mesh(std::move(verts), std::move(tets), labeler);
}

Mesh read_ascii_mesh(std::istream& in) {
  std::size_t nv = 0, nt = 0;
  if (!(in >> nv >> nt)) throw std::runtime_error("read_ascii_mesh: missing header");
  std::vector<Vec3> verts(nv);
  for (auto& v : verts)
    if (!(in >> v[0] >> v[1] >> v[2])) throw std::runtime_error("read_ascii_mesh: truncated vertex list");
  std::vector<std::array<int, 4>> tets(nt);
  for (auto& t : tets)
    if (!(in >> t[0] >> t[1] >> t[2] >> t[3])) throw std::runtime_error("read_ascii_mesh: truncated tet list");

  std::map<std::array<int, 3>, FacetLabel> labels;
  int a, b, c;
  std::string label;
  while (in >> a >> b >> c >> label) {
    FacetLabel l;
    if (label == "D" || label == "dirichlet")
      l = FacetLabel::Dirichlet;
    else if (label == "N" || label == "neumann")
      l = FacetLabel::Neumann;
    else
      throw std::runtime_error("read_ascii_mesh: unknown boundary label '" + label + "'");
    labels[sorted_triple(a, b, c)] = l;
  }

  // the labeler only sees geometry, so match labeled facets by centroid
  std::vector<std::pair<Vec3, FacetLabel>> by_centroid;
  for (const auto& [tri, l] : labels) {
    for (int v : tri)
      if (v < 0 || v >= static_cast<int>(nv)) throw std::runtime_error("read_ascii_mesh: bad boundary facet vertex");
    by_centroid.emplace_back((verts[tri[0]] + verts[tri[1]] + verts[tri[2]]) / 3.0, l);
  }
  return Mesh(verts, std::move(tets), [by_centroid](const Vec3& centroid, const Vec3&) {
    for (const auto& [c, l] : by_centroid)
      if ((c - centroid).norm() < 1e-12) return l;
    return FacetLabel::Dirichlet;
  });
}

}  // namespace divstokes
