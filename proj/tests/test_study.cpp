#include <cmath>
#include <sstream>

#include "doctest.h"
#include "divstokes/study.hpp"
#include "divstokes/verify.hpp"

using namespace divstokes;

namespace {

const MultiPoly X = MultiPoly::coordinate(0), Y = MultiPoly::coordinate(1);

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("order formula") {
  CHECK(eoc(1.0, 0.25, 0.2, 0.1) == doctest::Approx(2.0));
  CHECK(eoc(0.3, 0.3, 1.0, 0.5) == doctest::Approx(0.0));
  CHECK(eoc(1.0, 0.5, 0.4, 0.1) == doctest::Approx(0.5));
}

TEST_CASE("float formatting") {
  CHECK(format_float(1.0) == "1.00000e+00");
  CHECK(format_float(-2.5e-7) == "-2.50000e-07");
  CHECK(format_float(std::nan("")) == "nan");
  CHECK(format_float(INFINITY) == "inf");
}

TEST_CASE("error norms of interpolated linear data") {
  const Mesh mesh =
      relabeled(build_structured_cube(2), [](const Vec3&, const Vec3&) { return FacetLabel::Neumann; });
  const FeSpaces fes(mesh);
  Mat3 g;
  g << 0.1, 0.4, -0.2, 0.3, -0.5, 0.6, 0.7, -0.1, 0.4;
  const ManufacturedSolution ms = linear_solution(Vec3(0.5, -1.0, 0.2), g, 0.3, X - 2.0 * Y);
  StokesSolution s;
  s.u = interp_V(fes, ms.u);
  s.uhat = interp_Vhat(fes, ms.u);
  s.omega = interp_W(fes, ms.omega);
  s.p = interp_Q(fes, ms.pressure);
  s.sigma = interp_Sigma(fes, ms.sigma);
  const ErrorRow e = error_norms(s, ms);
  CHECK(e.eps < 1e-13);
  CHECK(e.l2 < 1e-13);
  CHECK(e.omega < 1e-13);
  CHECK(e.sigma.value() < 1e-13);
  CHECK(e.ntets == 48);
  CHECK(e.h == doctest::Approx(std::sqrt(3.0) / 2));
  // || q - mean_T q ||^2 = |T| / 20 sum_a (q(x_a) - q(x_T))^2 for affine q
  double ref = 0.0;
  for (int t = 0; t < 48; ++t) {
    const Vec3 c = mesh.tet_centroid(t);
    for (int k : mesh.tet(t)) {
      const Vec3 d = mesh.vertex(k) - c;
      ref += std::pow(d[0] - 2.0 * d[1], 2) * mesh.element_geometry(t).volume / 20.0;
    }
  }
  CHECK(e.p == doctest::Approx(std::sqrt(ref)).epsilon(1e-12));
}

TEST_CASE("linear flows are reproduced") {
  StudyParams p;
  p.nu = 1.0;
  CHECK(linear_reproduction_error(2, Method::Hdg, p) < 1e-11);
  CHECK(linear_reproduction_error(2, Method::Mcs, p) < 1e-11);
}

TEST_CASE("convergence report and CSV layout") {
  const ConvergenceReport r = convergence_study(Method::Mcs, {1, 2}, StudyParams{});
  CHECK(r.columns() == std::vector<std::string>{"eps", "l2", "omega", "p", "sigma"});
  CHECK(std::isnan(r.eoc(0, "l2")));
  CHECK(r.eoc(1, "l2") == doctest::Approx(eoc(r.error(0, "l2"), r.error(1, "l2"), r.levels[0].errors.h,
                                              r.levels[1].errors.h)));
  std::ostringstream out;
  write_convergence_csv(out, r);
  const auto l = lines(out.str());
  REQUIRE(l.size() == 3);
  CHECK(l[0] ==
        "level,ntets,h,err_eps,err_l2,err_omega,err_p,err_sigma,eoc_eps,eoc_l2,eoc_omega,eoc_p,eoc_sigma");
  CHECK(l[1].rfind("1,6,", 0) == 0);
  CHECK(l[2].rfind("2,48,", 0) == 0);

  const ConvergenceReport h = convergence_study(Method::Hdg, {1}, StudyParams{});
  CHECK(h.columns().size() == 4);
  CHECK(!h.levels[0].errors.sigma.has_value());
}

TEST_CASE("condition study rows") {
  const auto rows = condition_study({1, 2}, {2.0, 8.0}, StudyParams{});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].level == 1);
  CHECK(rows[3].level == 2);
  CHECK(rows[0].cond_mcs == rows[1].cond_mcs);
  CHECK(std::isinf(rows[2].cond_hdg));
  CHECK(std::isfinite(rows[3].cond_hdg));
  CHECK(rows[3].cond_hdg > 1.0);
  std::ostringstream out;
  write_condition_csv(out, rows);
  CHECK(lines(out.str()).size() == 5);
}

TEST_CASE("robustness against a gradient forcing") {
  for (Method m : {Method::Hdg, Method::Mcs}) {
    const RobustnessReport r = pressure_robustness(m, 2, StudyParams{}, default_pressure_potential());
    CHECK(r.kinematic_change < 1e-8);
    CHECK(r.pressure_shift_error < 1e-8);
    CHECK(r.stress_change < 1e-8);
  }
}
