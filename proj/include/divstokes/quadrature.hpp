#ifndef DIVSTOKES_QUADRATURE_HPP
#define DIVSTOKES_QUADRATURE_HPP

#include <vector>

#include <Eigen/Dense>

namespace divstokes {

/// Positive-weight rule on the reference triangle {(0,0),(1,0),(0,1)} or the
/// reference tet {0, e1, e2, e3}. Triangle points carry a zero third coordinate.
struct QuadRule {
  int dim = 3;
  int exact_degree = 0;
  std::vector<Eigen::Vector3d> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

inline constexpr int kMaxQuadratureDegree = 12;

/// Collapsed (Duffy) Gauss-Jacobi rule exact through `degree`. Rules are built
/// once per process and shared; the returned reference stays valid.
const QuadRule& rule_for(int simplex_dim, int degree);

/// Gauss-Jacobi nodes/weights on [0, 1] for the weight (1 - t)^alpha.
void gauss_jacobi_unit(int npoints, int alpha, std::vector<double>& nodes, std::vector<double>& weights);

/// Physical quadrature points on a tet or triangle, weights scaled by measure.
struct PhysicalRule {
  std::vector<Eigen::Vector3d> points;
  std::vector<double> weights;
};

PhysicalRule map_to_tet(const QuadRule& rule, const Eigen::Vector3d& v0, const Eigen::Matrix3d& jacobian);
PhysicalRule map_to_triangle(const QuadRule& rule, const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                             const Eigen::Vector3d& p2);

}  // namespace divstokes

#endif
