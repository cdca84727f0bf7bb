#include <cmath>

#include "doctest.h"
#include "divstokes/quadrature.hpp"

using namespace divstokes;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// int over the reference simplex of x^a y^b z^c
double exact_tet(int a, int b, int c) { return factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3); }
double exact_tri(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

double apply(const QuadRule& r, int a, int b, int c) {
  double s = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k)
    s += r.weights[k] * std::pow(r.points[k][0], a) * std::pow(r.points[k][1], b) * std::pow(r.points[k][2], c);
  return s;
}

}  // namespace

TEST_CASE("monomial exactness through degree 12") {
  for (int deg = 0; deg <= kMaxQuadratureDegree; ++deg) {
    const QuadRule& t = rule_for(3, deg);
    const QuadRule& f = rule_for(2, deg);
    CHECK(t.exact_degree >= deg);
    for (int a = 0; a <= t.exact_degree; ++a)
      for (int b = 0; a + b <= t.exact_degree; ++b) {
        CHECK(std::abs(apply(f, a, b, 0) - exact_tri(a, b)) <= 1e-13 * exact_tri(a, b));
        for (int c = 0; a + b + c <= t.exact_degree; ++c)
          CHECK(std::abs(apply(t, a, b, c) - exact_tet(a, b, c)) <= 1e-13 * exact_tet(a, b, c));
      }
  }
}

TEST_CASE("weights positive and summing to the simplex measure") {
  for (int deg = 0; deg <= kMaxQuadratureDegree; ++deg) {
    for (int dim : {2, 3}) {
      const QuadRule& r = rule_for(dim, deg);
      double s = 0.0;
      for (double w : r.weights) {
        CHECK(w > 0.0);
        s += w;
      }
      CHECK(s == doctest::Approx(dim == 3 ? 1.0 / 6.0 : 0.5).epsilon(1e-14));
    }
  }
}

TEST_CASE("worked examples") {
  const QuadRule& mid = rule_for(3, 0);
  CHECK(mid.size() == 1);
  CHECK(mid.weights[0] == doctest::Approx(1.0 / 6.0));
  CHECK((mid.points[0] - Eigen::Vector3d::Constant(0.25)).norm() < 1e-15);

  // 2! 3! 5! / 13!
  CHECK(apply(rule_for(3, 10), 2, 3, 5) == doctest::Approx(1440.0 / 6227020800.0).epsilon(1e-13));
  CHECK(apply(rule_for(2, 2), 1, 1, 0) == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
}

TEST_CASE("rule cache is stable and rejects bad requests") {
  CHECK(&rule_for(3, 7) == &rule_for(3, 7));
  CHECK_THROWS_AS(rule_for(3, 13), std::invalid_argument);
  CHECK_THROWS_AS(rule_for(2, -1), std::invalid_argument);
  CHECK_THROWS_AS(rule_for(4, 2), std::invalid_argument);
}

TEST_CASE("mapped rules integrate over physical simplices") {
  Eigen::Matrix3d j;
  j << 2, 0.1, 0, 0, 1, 0.3, 0, 0, 0.5;
  const PhysicalRule t = map_to_tet(rule_for(3, 2), Eigen::Vector3d(1, 1, 1), j);
  double vol = 0.0, mx = 0.0;
  for (std::size_t k = 0; k < t.points.size(); ++k) {
    vol += t.weights[k];
    mx += t.weights[k] * t.points[k][0];
  }
  CHECK(vol == doctest::Approx(std::abs(j.determinant()) / 6.0));
  // centroid x of the tet with vertices v0, v0 + J e_i
  const double cx = 1.0 + (j(0, 0) + j(0, 1) + j(0, 2)) / 4.0;
  CHECK(mx / vol == doctest::Approx(cx));

  const PhysicalRule f =
      map_to_triangle(rule_for(2, 1), Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(2, 0, 0), Eigen::Vector3d(0, 0, 3));
  double area = 0.0;
  for (double w : f.weights) area += w;
  CHECK(area == doctest::Approx(3.0));
}
