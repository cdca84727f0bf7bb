#include "divstokes/quadrature.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace divstokes {

void gauss_jacobi_unit(int npoints, int alpha, std::vector<double>& nodes, std::vector<double>& weights) {
  // Golub-Welsch on [-1, 1] for (1 - s)^alpha, then s = 2 t - 1.
  const double a = alpha;
  const double b = 0.0;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(npoints, npoints);
  for (int k = 0; k < npoints; ++k) {
    const double s = 2.0 * k + a + b;
    jac(k, k) = (s == 0.0) ? 0.0 : (b * b - a * a) / (s * (s + 2.0));
    if (k == 0) jac(k, k) = (b - a) / (a + b + 2.0);
    if (k + 1 < npoints) {
      const double n = k + 1;
      const double sn = 2.0 * n + a + b;
      const double beta = 4.0 * n * (n + a) * (n + b) * (n + a + b) / (sn * sn * (sn + 1.0) * (sn - 1.0));
      jac(k, k + 1) = jac(k + 1, k) = std::sqrt(beta);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  // mu0 = int_{-1}^{1} (1 - s)^alpha ds
  const double mu0 = std::pow(2.0, a + 1.0) / (a + 1.0);
  nodes.resize(npoints);
  weights.resize(npoints);
  for (int k = 0; k < npoints; ++k) {
    const double s = es.eigenvalues()[k];
    const double v0 = es.eigenvectors()(0, k);
    nodes[k] = 0.5 * (s + 1.0);
    weights[k] = mu0 * v0 * v0 / std::pow(2.0, a + 1.0);
  }
}

namespace {

QuadRule build_rule(int dim, int degree) {
  const int m = degree / 2 + 1;
  QuadRule r;
  r.dim = dim;
  r.exact_degree = 2 * m - 1;
  std::vector<double> x2, w2, x1, w1, x0, w0;
  if (dim == 3) {
    gauss_jacobi_unit(m, 2, x2, w2);
    gauss_jacobi_unit(m, 1, x1, w1);
    gauss_jacobi_unit(m, 0, x0, w0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          const double u = x2[i], v = x1[j], w = x0[k];
          r.points.emplace_back(u, (1.0 - u) * v, (1.0 - u) * (1.0 - v) * w);
          r.weights.push_back(w2[i] * w1[j] * w0[k]);
        }
  } else {
    gauss_jacobi_unit(m, 1, x1, w1);
    gauss_jacobi_unit(m, 0, x0, w0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double u = x1[i], v = x0[j];
        r.points.emplace_back(u, (1.0 - u) * v, 0.0);
        r.weights.push_back(w1[i] * w0[j]);
      }
  }
  return r;
}

struct RuleTable {
  std::array<QuadRule, kMaxQuadratureDegree + 1> tri;
  std::array<QuadRule, kMaxQuadratureDegree + 1> tet;
  RuleTable() {
    for (int d = 0; d <= kMaxQuadratureDegree; ++d) {
      tri[d] = build_rule(2, d);
      tet[d] = build_rule(3, d);
    }
  }
};

}  // namespace

const QuadRule& rule_for(int simplex_dim, int degree) {
  if (simplex_dim != 2 && simplex_dim != 3) throw std::invalid_argument("rule_for: simplex_dim must be 2 or 3");
  if (degree < 0) throw std::invalid_argument("rule_for: negative degree");
  if (degree > kMaxQuadratureDegree) throw std::invalid_argument("rule_for: degree exceeds 12");
  static const RuleTable table;  // initialization is thread-safe
  return simplex_dim == 2 ? table.tri[degree] : table.tet[degree];
}

PhysicalRule map_to_tet(const QuadRule& rule, const Eigen::Vector3d& v0, const Eigen::Matrix3d& jacobian) {
  const double det = std::abs(jacobian.determinant());
  PhysicalRule p;
  p.points.reserve(rule.size());
  p.weights.reserve(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    p.points.push_back(v0 + jacobian * rule.points[q]);
    p.weights.push_back(rule.weights[q] * det);
  }
  return p;
}

PhysicalRule map_to_triangle(const QuadRule& rule, const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                             const Eigen::Vector3d& p2) {
  const Eigen::Vector3d e1 = p1 - p0, e2 = p2 - p0;
  const double scale = e1.cross(e2).norm();  // twice the area
  PhysicalRule p;
  p.points.reserve(rule.size());
  p.weights.reserve(rule.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    p.points.push_back(p0 + rule.points[q][0] * e1 + rule.points[q][1] * e2);
    p.weights.push_back(rule.weights[q] * scale);
  }
  return p;
}

}  // namespace divstokes
