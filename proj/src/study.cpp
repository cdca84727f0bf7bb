#include "divstokes/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "divstokes/quadrature.hpp"

namespace divstokes {

const char* to_string(Method m) { return m == Method::Hdg ? "hdg" : "mcs"; }

ErrorRow error_norms(const StokesSolution& s, const ManufacturedSolution& exact) {
  const FeSpaces& fes = *s.u.fes;
  const Mesh& mesh = fes.mesh();
  const MatPoly eps_u = eps(exact.u);
  const QuadRule& rule = rule_for(3, kMaxQuadratureDegree);
  double e_eps = 0.0, e_l2 = 0.0, e_w = 0.0, e_p = 0.0, e_s = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const AffineVector u = local_vector(s.u, t);
    const AffineVector w = local_vector(s.omega, t);
    const Mat3 eu = u.sym_gradient();
    const double p = element_value(s.p, t);
    AffineMatrix sig;
    if (s.sigma) sig = local_matrix(*s.sigma, t);
    const PhysicalRule q = map_to_tet(rule, mesh.vertex(mesh.tet(t)[0]), mesh.element_geometry(t).jacobian);
    for (std::size_t k = 0; k < q.points.size(); ++k) {
      const Vec3& x = q.points[k];
      const double wt = q.weights[k];
      e_eps += wt * (evaluate(eps_u, x) - eu).squaredNorm();
      e_l2 += wt * (evaluate(exact.u, x) - u(x)).squaredNorm();
      e_w += wt * (evaluate(exact.omega, x) - w(x)).squaredNorm();
      const double dp = exact.pressure(x) - p;
      e_p += wt * dp * dp;
      if (s.sigma) e_s += wt * (evaluate(exact.sigma, x) - sig(x)).squaredNorm();
    }
  }
  ErrorRow r;
  r.ntets = static_cast<int>(mesh.num_tets());
  r.h = mesh.h_max();
  r.eps = std::sqrt(e_eps);
  r.l2 = std::sqrt(e_l2);
  r.omega = std::sqrt(e_w);
  r.p = std::sqrt(e_p);
  if (s.sigma) r.sigma = std::sqrt(e_s);
  return r;
}

double eoc(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

std::vector<std::string> ConvergenceReport::columns() const {
  std::vector<std::string> c{"eps", "l2", "omega", "p"};
  if (method == Method::Mcs) c.push_back("sigma");
  return c;
}

double ConvergenceReport::error(int i, const std::string& column) const {
  const ErrorRow& r = levels.at(i).errors;
  if (column == "eps") return r.eps;
  if (column == "l2") return r.l2;
  if (column == "omega") return r.omega;
  if (column == "p") return r.p;
  if (column == "sigma" && r.sigma) return *r.sigma;
  throw std::invalid_argument("ConvergenceReport: unknown column '" + column + "'");
}

double ConvergenceReport::eoc(int i, const std::string& column) const {
  if (i == 0) return std::numeric_limits<double>::quiet_NaN();
  return divstokes::eoc(error(i - 1, column), error(i, column), levels[i - 1].errors.h, levels[i].errors.h);
}

StokesSolution solve_method(const FeSpaces& fes, Method method, const StudyParams& params,
                            const ManufacturedSolution& data) {
  if (method == Method::Hdg) return solve_hdg(assemble_hdg(fes, params.hdg(), data));
  return solve_mcs(assemble_mcs(fes, params.mcs(), data));
}

ConvergenceReport convergence_study(Method method, const std::vector<int>& levels, const StudyParams& params,
                                    std::ostream* progress) {
  const ManufacturedSolution ms = build_manufactured(params.nu);
  ConvergenceReport rep;
  rep.method = method;
  for (int n : levels) {
    const auto start = std::chrono::steady_clock::now();
    const Mesh mesh = build_structured_cube(n);
    const FeSpaces fes(mesh);
    const StokesSolution s = solve_method(fes, method, params, ms);
    LevelRun run;
    run.errors = error_norms(s, ms);
    run.errors.level = n;
    run.div_max = s.div_max;
    run.coeff_scale = s.coeff_scale;
    run.stats = s.stats;
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rep.levels.push_back(run);
    if (progress)
      *progress << to_string(method) << " n=" << n << " tets=" << run.errors.ntets << " dofs=" << s.stats.dimension
                << " eps=" << format_float(run.errors.eps) << " time=" << run.seconds << "s\n";
  }
  return rep;
}

std::string format_float(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", v);
  return buf;
}

void write_comment_header(std::ostream& out, const std::vector<std::string>& lines) {
  for (const auto& l : lines) out << "# " << l << '\n';
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
  const auto cols = report.columns();
  out << "level,ntets,h";
  for (const auto& c : cols) out << ",err_" << c;
  for (const auto& c : cols) out << ",eoc_" << c;
  out << '\n';
  for (int i = 0; i < static_cast<int>(report.levels.size()); ++i) {
    const ErrorRow& r = report.levels[i].errors;
    out << r.level << ',' << r.ntets << ',' << format_float(r.h);
    for (const auto& c : cols) out << ',' << format_float(report.error(i, c));
    for (const auto& c : cols) out << ',' << format_float(report.eoc(i, c));
    out << '\n';
  }
}

MultiPoly default_pressure_potential() {
  return 10.0 * (MultiPoly::monomial(5, 0, 0) + MultiPoly::monomial(0, 5, 0) + MultiPoly::monomial(0, 0, 5));
}

namespace {

double relative_change(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double s = a.norm();
  return s > 0.0 ? (b - a).norm() / s : (b - a).norm();
}

}  // namespace

RobustnessReport pressure_robustness(Method method, int level, const StudyParams& params, const MultiPoly& phi) {
  const ManufacturedSolution base = build_manufactured(params.nu);
  const ManufacturedSolution shifted = with_pressure_potential(base, phi);
  const Mesh mesh = build_structured_cube(level);
  const FeSpaces fes(mesh);
  const StokesSolution a = solve_method(fes, method, params, base);
  const StokesSolution b = solve_method(fes, method, params, shifted);

  RobustnessReport r;
  r.method = method;
  r.level = level;
  r.kinematic_change = relative_change(pack_kinematic(a.u, a.uhat, a.omega), pack_kinematic(b.u, b.uhat, b.omega));
  if (a.sigma && b.sigma) r.stress_change = relative_change(a.sigma->coeffs, b.sigma->coeffs);
  const Eigen::VectorXd iq = interp_Q(fes, phi).coeffs;
  const Eigen::VectorXd shift = b.p.coeffs - a.p.coeffs;
  r.pressure_shift_error = iq.norm() > 0.0 ? (shift - iq).norm() / iq.norm() : shift.norm();
  r.div_max = std::max(a.div_max, b.div_max);
  return r;
}

double condition_number(const SparseMatrix& a) {
  try {
    return estimate_condition(a).cond();
  } catch (const NotPositiveDefiniteError&) {
    return std::numeric_limits<double>::infinity();
  }
}

std::vector<ConditionRow> condition_study(const std::vector<int>& levels, const std::vector<double>& alphas,
                                          const StudyParams& params, std::ostream* progress) {
  if (alphas.empty()) throw std::invalid_argument("condition_study: no alpha values");
  std::vector<ConditionRow> rows;
  for (int n : levels) {
    const Mesh mesh = build_structured_cube(n);
    const FeSpaces fes(mesh);
    McsParams mp = params.mcs();
    mp.add_divdiv = true;
    const double cond_mcs = condition_number(assemble_mcs_operator(fes, mp));
    for (double alpha : alphas) {
      HdgParams hp = params.hdg();
      hp.alpha = alpha;
      ConditionRow r;
      r.level = n;
      r.ntets = static_cast<int>(mesh.num_tets());
      r.alpha = alpha;
      r.cond_hdg = condition_number(assemble_hdg_operator(fes, hp));
      r.cond_mcs = cond_mcs;
      rows.push_back(r);
      if (progress)
        *progress << "n=" << n << " alpha=" << alpha << " cond_hdg=" << format_float(r.cond_hdg)
                  << " cond_mcs=" << format_float(cond_mcs) << '\n';
    }
  }
  return rows;
}

void write_condition_csv(std::ostream& out, const std::vector<ConditionRow>& rows) {
  out << "level,ntets,alpha,cond_hdg,cond_mcs\n";
  for (const auto& r : rows)
    out << r.level << ',' << r.ntets << ',' << format_float(r.alpha) << ',' << format_float(r.cond_hdg) << ','
        << format_float(r.cond_mcs) << '\n';
}

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

double dual_norm(const ColMatrix& p, const Eigen::VectorXd& r) {
  Eigen::SimplicialLLT<ColMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt(p);
  if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError("consistency_residual: norm matrix is not SPD");
  return std::sqrt(std::max(0.0, r.dot(llt.solve(r))));
}

}  // namespace

double consistency_residual(Method method, int level, const StudyParams& params) {
  const ManufacturedSolution ms = build_manufactured(params.nu);
  const Mesh mesh = build_structured_cube(level);
  const FeSpaces fes(mesh);
  const Eigen::VectorXd x =
      pack_kinematic(interp_V(fes, ms.u), interp_Vhat(fes, ms.u), interp_W(fes, ms.omega));
  const Eigen::VectorXd p = interp_Q(fes, ms.pressure).coeffs;

  if (method == Method::Hdg) {
    const SaddleSystem sys = assemble_hdg(fes, params.hdg(), ms);
    const Eigen::VectorXd r = sys.A * x + sys.B * p - sys.rhs_kinematic;
    return dual_norm(ColMatrix(sys.A.storage()), r);
  }

  const McsSystem sys = assemble_mcs(fes, params.mcs(), ms);
  Eigen::VectorXd y(sys.full.rows());
  y << interp_Sigma(fes, ms.sigma).coeffs, x, p;
  const Eigen::VectorXd r = sys.full * y - sys.rhs;

  // Block diagonal norm matrix diag(M, A + nu/3 divdiv, nu^-1 |T|).
  std::vector<Triplet> e;
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const int* sd = fes.dofs(SpaceTag::SigmaH).dofs(t);
    const Eigen::MatrixXd& m = sys.elements[t].mass;
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) e.emplace_back(sd[i], sd[j], m(i, j));
    e.emplace_back(sys.num_stress + sys.num_kinematic + t, sys.num_stress + sys.num_kinematic + t,
                   mesh.element_geometry(t).volume / params.nu);
  }
  McsParams mp = params.mcs();
  mp.add_divdiv = true;
  const SparseMatrix a = assemble_mcs_operator(fes, mp);
  const auto& as = a.storage();
  for (int i = 0; i < as.outerSize(); ++i)
    for (SparseMatrix::Storage::InnerIterator it(as, i); it; ++it)
      e.emplace_back(sys.num_stress + i, sys.num_stress + static_cast<int>(it.col()), it.value());
  ColMatrix pm(sys.full.rows(), sys.full.cols());
  pm.setFromTriplets(e.begin(), e.end());
  return dual_norm(pm, r);
}

}  // namespace divstokes
