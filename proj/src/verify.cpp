#include "divstokes/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "divstokes/tensor.hpp"

namespace divstokes {

Check make_check(std::string group, std::string name, double value, double bound, bool upper) {
  Check c;
  c.group = std::move(group);
  c.name = std::move(name);
  c.value = value;
  c.bound = bound;
  c.upper = upper;
  c.passed = upper ? value <= bound : value >= bound;
  return c;
}

bool all_passed(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

void write_checks_csv(std::ostream& out, const std::vector<Check>& checks) {
  out << "group,check,value,relation,bound,pass\n";
  for (const auto& c : checks)
    out << c.group << ',' << c.name << ',' << format_float(c.value) << ',' << (c.upper ? "<=" : ">=") << ','
        << format_float(c.bound) << ',' << (c.passed ? "yes" : "no") << '\n';
}

VecPoly random_vector_polynomial(int degree, std::mt19937& rng) {
  std::normal_distribution<double> normal;
  VecPoly u;
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i <= degree; ++i)
      for (int j = 0; i + j <= degree; ++j)
        for (int k = 0; i + j + k <= degree; ++k) u[c] += MultiPoly::monomial(i, j, k, normal(rng));
  return u;
}

double commuting_defect(const FeSpaces& fes, const VecPoly& u) {
  const DiscreteField lhs = divergence(interp_V(fes, u));
  const DiscreteField rhs = interp_Q(fes, div(u));
  const double scale = std::max(1.0, rhs.coeffs.cwiseAbs().maxCoeff());
  return (lhs.coeffs - rhs.coeffs).cwiseAbs().maxCoeff() / scale;
}

namespace {

int locate_tet(const Mesh& mesh, const Vec3& x) {
  int best = -1;
  double best_min = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const Vec3 s = mesh.element_geometry(t).jacobian.inverse() * (x - mesh.vertex(mesh.tet(t)[0]));
    const double m = std::min({1.0 - s.sum(), s[0], s[1], s[2]});
    if (m > best_min) {
      best_min = m;
      best = t;
    }
  }
  return best;
}

int locate_facet(const Mesh& mesh, const Vec3& x) {
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f) {
    const FacetFrame fr = mesh.facet_frame(f);
    const double d = std::abs(fr.normal.dot(x - fr.centroid));
    if (d > 1e-12) continue;
    // inside test through barycentric coordinates in the facet plane
    const auto& v = mesh.facet(f);
    const Vec3 a = mesh.vertex(v[0]), b = mesh.vertex(v[1]), c = mesh.vertex(v[2]);
    Eigen::Matrix<double, 3, 2> e;
    e.col(0) = b - a;
    e.col(1) = c - a;
    const Eigen::Vector2d l = e.colPivHouseholderQr().solve(x - a);
    if (std::min({l[0], l[1], 1.0 - l.sum()}) < -1e-12) continue;
    if (d < best_dist) {
      best_dist = d;
      best = f;
    }
  }
  if (best < 0) throw std::runtime_error("locate_facet: point is not on a facet");
  return best;
}

}  // namespace

double idempotence_defect(const FeSpaces& fes, SpaceTag space, std::mt19937& rng) {
  const Mesh& mesh = fes.mesh();
  const DiscreteField f = random_field(fes, space, rng);
  DiscreteField back;
  switch (space) {
    case SpaceTag::Vh:
      back = interp_V(fes, [&](const Vec3& x) { return local_vector(f, locate_tet(mesh, x))(x); }, 1);
      break;
    case SpaceTag::Wh:
      back = interp_W(fes, [&](const Vec3& x) { return local_vector(f, locate_tet(mesh, x))(x); }, 1);
      break;
    case SpaceTag::VhatH:
      back = interp_Vhat(fes, [&](const Vec3& x) { return facet_value(f, locate_facet(mesh, x)); }, 0);
      break;
    case SpaceTag::Qh:
      back = interp_Q(fes, [&](const Vec3& x) { return element_value(f, locate_tet(mesh, x)); }, 0);
      break;
    case SpaceTag::SigmaH:
      if (mesh.num_tets() != 1) throw std::invalid_argument("idempotence_defect: SigmaH needs a single-tet mesh");
      back = interp_Sigma(fes, [&](const Vec3& x) { return local_matrix(f, 0)(x); }, 1);
      break;
  }
  return (back.coeffs - f.coeffs).cwiseAbs().maxCoeff() / f.coeffs.cwiseAbs().maxCoeff();
}

double linear_reproduction_error(int n, Method method, const StudyParams& params) {
  const Mesh mesh = relabeled(build_structured_cube(n), [](const Vec3& c, const Vec3&) {
    return std::abs(c[0]) < 1e-12 ? FacetLabel::Dirichlet : FacetLabel::Neumann;
  });
  const FeSpaces fes(mesh);
  Mat3 g = Mat3::Zero();
  g(1, 0) = 1.0;
  const ManufacturedSolution ms = linear_solution(Vec3::Zero(), g, params.nu, MultiPoly::constant(0.3));
  const ErrorRow e = error_norms(solve_method(fes, method, params, ms), ms);
  return std::max({e.eps, e.l2, e.omega, e.p, e.sigma.value_or(0.0)});
}

double dirichlet_tangential_mean(const DiscreteField& u) {
  const Mesh& mesh = u.fes->mesh();
  double s = 0.0;
  for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f) {
    if (mesh.facet_label(f) != FacetLabel::Dirichlet) continue;
    const FacetFrame fr = mesh.facet_frame(f);
    const AffineVector a = local_vector(u, mesh.facet_sides(f)[0].tet);
    s += fr.area * tangential(a(fr.centroid), fr.normal).squaredNorm();
  }
  return std::sqrt(s);
}

double stress_nt_jump(const DiscreteField& sigma) {
  const FeSpaces& fes = *sigma.fes;
  const Mesh& mesh = fes.mesh();
  double worst = 0.0, scale = 0.0;
  for (int f = 0; f < static_cast<int>(mesh.num_facets()); ++f) {
    const auto& sides = mesh.facet_sides(f);
    const FacetFrame fr = mesh.facet_frame(f);
    const Vec3& n = mesh.facet_normal(f);
    const Vec3 a = tangential(local_matrix(sigma, sides[0].tet)(fr.centroid) * n, n);
    scale = std::max(scale, a.norm());
    if (sides.size() < 2) continue;
    const Vec3 b = tangential(local_matrix(sigma, sides[1].tet)(fr.centroid) * n, n);
    scale = std::max(scale, b.norm());
    for (const Vec3& t : fes.vhat_tangents(f)) worst = std::max(worst, std::abs((a - b).dot(t)));
  }
  return scale > 0.0 ? worst / scale : worst;
}

double stress_trace_defect(const DiscreteField& sigma) {
  const Mesh& mesh = sigma.fes->mesh();
  double worst = 0.0, scale = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
    const AffineMatrix s = local_matrix(sigma, t);
    for (int v : mesh.tet(t)) {
      const Mat3 m = s(mesh.vertex(v));
      worst = std::max(worst, std::abs(m.trace()));
      scale = std::max(scale, m.norm());
    }
  }
  return scale > 0.0 ? worst / scale : worst;
}

namespace {

struct Runner {
  const VerifyOptions& opt;
  std::ostream* progress;
  std::vector<Check> checks;
  double worst_div = 0.0;

  void add(const std::string& group, const std::string& name, double value, double bound, bool upper = true) {
    checks.push_back(make_check(group, name, value, bound, upper));
    if (progress)
      *progress << (checks.back().passed ? "pass " : "FAIL ") << group << '/' << name << ' '
                << format_float(value) << (upper ? " <= " : " >= ") << format_float(bound) << '\n';
  }

  void record_div(const StokesSolution& s) {
    worst_div = std::max(worst_div, s.coeff_scale > 0.0 ? s.div_max / s.coeff_scale : s.div_max);
  }
};

double relative(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double s = b.norm();
  return s > 0.0 ? (a - b).norm() / s : (a - b).norm();
}

double min_volume(const Mesh& mesh) {
  double v = std::numeric_limits<double>::infinity();
  for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) v = std::min(v, mesh.element_geometry(t).volume);
  return v;
}

Mesh single_tet_mesh() {
  return Mesh({Vec3(0, 0, 0), Vec3(1, 0.1, 0), Vec3(0.2, 0.9, 0.1), Vec3(0.1, 0.3, 1.1)}, {{0, 1, 2, 3}},
              [](const Vec3&, const Vec3&) { return FacetLabel::Neumann; });
}

void interp_checks(Runner& r, const FeSpaces& fes, std::mt19937& rng) {
  double commuting = 0.0;
  for (int k = 0; k < 5; ++k) commuting = std::max(commuting, commuting_defect(fes, random_vector_polynomial(5, rng)));
  r.add("interp", "commuting_diagram", commuting, 1e-12);
  for (SpaceTag s : {SpaceTag::Vh, SpaceTag::VhatH, SpaceTag::Wh, SpaceTag::Qh})
    r.add("interp", std::string("idempotence_") + to_string(s), idempotence_defect(fes, s, rng), 1e-12);
  const Mesh one = single_tet_mesh();
  const FeSpaces one_fes(one);
  r.add("interp", "idempotence_SigmaH", idempotence_defect(one_fes, SpaceTag::SigmaH, rng), 1e-12);
}

void korn_checks(Runner& r, const FeSpaces& coarse, const FeSpaces& fine) {
  const KornStats a = korn_suite(coarse, r.opt.samples, r.opt.seed);
  const KornStats b = korn_suite(fine, r.opt.samples, r.opt.seed + 1);
  r.add("korn", "rotation_projection_identity", std::max(a.rotation_defect, b.rotation_defect), 1e-12);
  r.add("korn", "rotation_moment_identity", std::max(a.identity_defect, b.identity_defect), 1e-12);
  r.add("korn", "projection_chain", std::max(a.chain_violation, b.chain_violation), 1e-12);
  r.add("korn", "grad_bound_variation", a.grad_bound.variation(b.grad_bound), 0.5);
  r.add("korn", "jump_equivalence_variation", a.jump_equivalence.variation(b.jump_equivalence), 0.5);
  r.add("korn", "hdg_korn_variation", a.hdg_korn.variation(b.hdg_korn), 0.5);
  r.add("korn", "hdg_korn_reverse_variation", a.hdg_korn_reverse.variation(b.hdg_korn_reverse), 0.5);
}

void norm_checks(Runner& r, const FeSpaces& coarse, const FeSpaces& fine) {
  const NormEquivalenceStats a = norm_equivalence_suite(coarse, r.opt.samples, r.opt.seed + 2);
  const NormEquivalenceStats b = norm_equivalence_suite(fine, r.opt.samples, r.opt.seed + 3);
  r.add("norms", "pythagoras_identity", std::max(a.pythagoras_defect, b.pythagoras_defect), 1e-12);
  r.add("norms", "curl_normal_variation", a.curl_normal.variation(b.curl_normal), 0.5);
  r.add("norms", "curl_kappa_variation", a.curl_kappa.variation(b.curl_kappa), 0.5);
  r.add("norms", "kappa_h1_variation", a.kappa_h1.variation(b.kappa_h1), 0.5);
  r.add("norms", "elementwise_variation", a.elementwise.variation(b.elementwise), 0.5);
  r.add("norms", "triple_vs_eps_variation", a.triple_vs_eps.variation(b.triple_vs_eps), 0.5);
  r.add("norms", "eps_vs_stress_variation", a.eps_vs_stress.variation(b.eps_vs_stress), 0.5);
}

void hdg_checks(Runner& r, const FeSpaces& coarse, const FeSpaces& fine, std::mt19937& rng) {
  const StudyParams& p = r.opt.params;
  const HdgParams hp = p.hdg();
  const SparseMatrix a = assemble_hdg_operator(coarse, hp);
  r.add("hdg", "symmetry", a.symmetry_defect() / a.storage().coeffs().cwiseAbs().maxCoeff(), 1e-12);

  const DiscreteField u = random_field(coarse, SpaceTag::Vh, rng);
  const DiscreteField uh = random_field(coarse, SpaceTag::VhatH, rng);
  const DiscreteField w = random_field(coarse, SpaceTag::Wh, rng);
  const Eigen::VectorXd x = pack_kinematic(u, uh, w);
  const double energy = hdg_energy(u, uh, w, hp);
  r.add("hdg", "energy_identity", std::abs(x.dot(a * x) - energy) / std::abs(energy), 1e-10);

  std::vector<double> coercivity;
  for (const FeSpaces* fes : {&coarse, &fine}) {
    double lmin = 0.0;
    try {
      lmin = estimate_condition(fes == &coarse ? a : assemble_hdg_operator(*fes, hp)).lambda_min;
    } catch (const NotPositiveDefiniteError&) {
      lmin = 0.0;
    }
    coercivity.push_back(lmin / (p.nu * min_volume(fes->mesh())));
  }
  r.add("hdg", "coercivity_coarse", coercivity[0], 0.0, false);
  r.add("hdg", "coercivity_fine", coercivity[1], 0.0, false);
  r.add("hdg", "coercivity_level_ratio", coercivity[1] / coercivity[0], 0.25, false);

  const int n0 = r.opt.levels[0], n1 = r.opt.levels[1];
  const double h_ratio = double(n1) / n0;
  const double c0 = consistency_residual(Method::Hdg, n0, p), c1 = consistency_residual(Method::Hdg, n1, p);
  r.add("hdg", "consistency_residual_order", std::log(c0 / c1) / std::log(h_ratio), 0.5, false);

  const ManufacturedSolution ms = build_manufactured(p.nu);
  const StokesSolution s0 = solve_method(coarse, Method::Hdg, p, ms);
  const StokesSolution s1 = solve_method(fine, Method::Hdg, p, ms);
  r.record_div(s0);
  r.record_div(s1);
  r.add("hdg", "dirichlet_tangential_mean_ratio", dirichlet_tangential_mean(s1.u) / dirichlet_tangential_mean(s0.u),
        1.0);
  StudyParams unit = p;
  unit.nu = 1.0;
  r.add("hdg", "linear_reproduction", linear_reproduction_error(n0, Method::Hdg, unit), 1e-11);
}

void mcs_checks(Runner& r, const FeSpaces& coarse, const FeSpaces& fine, std::mt19937& rng) {
  const StudyParams& p = r.opt.params;

  const DiscreteField tau = random_field(coarse, SpaceTag::SigmaH, rng);
  const DiscreteField v = random_field(coarse, SpaceTag::Vh, rng);
  const DiscreteField vh = random_field(coarse, SpaceTag::VhatH, rng);
  const DiscreteField eta = random_field(coarse, SpaceTag::Wh, rng);
  const double full_form = stress_pairing(tau, v, vh, eta);
  r.add("mcs", "pairing_forms", std::abs(full_form - stress_pairing_compact(tau, v, vh, eta)) / std::abs(full_form),
        1e-11);

  std::normal_distribution<double> normal;
  Mat3 sym_dev;
  for (int i = 0; i < 9; ++i) sym_dev(i / 3, i % 3) = normal(rng);
  sym_dev = dev(sym(sym_dev));
  const DiscreteField sd = interp_Sigma(coarse, [&](const Vec3&) { return sym_dev; }, 0);
  const double skew = stress_pairing(sd, zero_field(coarse, SpaceTag::Vh), zero_field(coarse, SpaceTag::VhatH), eta);
  r.add("mcs", "symmetric_skew_orthogonality", std::abs(skew) / (sym_dev.norm() * eta.coeffs.norm()), 1e-12);

  const ManufacturedSolution ms = build_manufactured(p.nu);
  const McsSystem sys = assemble_mcs(coarse, p.mcs(), ms);
  const StokesSolution cond = solve_mcs(sys);
  const StokesSolution full = solve_mcs_full(sys);
  r.record_div(cond);
  r.record_div(full);
  const double cvf = std::max({relative(cond.u.coeffs, full.u.coeffs), relative(cond.omega.coeffs, full.omega.coeffs),
                               relative(cond.sigma->coeffs, full.sigma->coeffs), relative(cond.p.coeffs, full.p.coeffs)});
  r.add("mcs", "condensed_vs_full", cvf, 1e-10);

  McsParams dd = p.mcs();
  dd.add_divdiv = true;
  double lmin = 0.0;
  try {
    lmin = estimate_condition(assemble_mcs_operator(coarse, dd)).lambda_min;
  } catch (const NotPositiveDefiniteError&) {
    lmin = 0.0;
  }
  r.add("mcs", "reduced_block_min_eigenvalue", lmin, 0.0, false);

  r.add("mcs", "stress_trace_free", stress_trace_defect(*cond.sigma), 1e-12);
  r.add("mcs", "stress_nt_continuity", stress_nt_jump(*cond.sigma), 1e-8);

  // residual of the vorticity rows at the full solution
  Eigen::VectorXd y(sys.full.rows());
  y << full.sigma->coeffs, pack_kinematic(full.u, full.uhat, full.omega), full.p.coeffs;
  const Eigen::VectorXd res = sys.full * y - sys.rhs;
  const KinematicLayout& l = coarse.layout();
  r.add("mcs", "weak_symmetry_residual", res.segment(sys.num_stress + l.n_v + l.n_vhat, l.n_w).norm() / sys.rhs.norm(),
        1e-10);

  const ManufacturedSolution ms10 = scaled(ms, 10.0);
  StudyParams p10 = p;
  p10.nu *= 10.0;
  const StokesSolution s10 = solve_method(coarse, Method::Mcs, p10, ms10);
  r.record_div(s10);
  const double scaling = std::max({relative(s10.u.coeffs, cond.u.coeffs), relative(s10.omega.coeffs, cond.omega.coeffs),
                                   relative(s10.sigma->coeffs, 10.0 * cond.sigma->coeffs),
                                   relative(s10.p.coeffs, 10.0 * cond.p.coeffs)});
  r.add("mcs", "viscosity_scaling", scaling, 1e-8);

  // net flux of I_W omega per tet, relative to the largest facet-flux sum of a tet
  double div_iw = 0.0;
  for (const FeSpaces* fes : {&coarse, &fine}) {
    const Mesh& mesh = fes->mesh();
    const DiscreteField iw = interp_W(*fes, ms.omega);
    double flux_max = 0.0, scale = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.num_tets()); ++t) {
      double s = 0.0;
      for (int i = 0; i < 4; ++i) {
        const int f = mesh.tet_facet(t, i);
        s += mesh.facet_frame(f).area * std::abs(iw.coeffs[f]);
      }
      scale = std::max(scale, s);
      flux_max = std::max(flux_max, std::abs(local_vector(iw, t).divergence() * mesh.element_geometry(t).volume));
    }
    div_iw = std::max(div_iw, flux_max / scale);
  }
  r.add("mcs", "vorticity_stabilization_consistency", div_iw, 1e-11);

  const int n0 = r.opt.levels[0], n1 = r.opt.levels[1];
  const double c0 = consistency_residual(Method::Mcs, n0, p), c1 = consistency_residual(Method::Mcs, n1, p);
  r.add("mcs", "consistency_residual_order", std::log(c0 / c1) / std::log(double(n1) / n0), 0.5, false);
  StudyParams unit = p;
  unit.nu = 1.0;
  r.add("mcs", "linear_reproduction", linear_reproduction_error(n0, Method::Mcs, unit), 1e-11);

  const StokesSolution s1 = solve_method(fine, Method::Mcs, p, ms);
  r.record_div(s1);
}

void robustness_checks(Runner& r) {
  const MultiPoly phi = default_pressure_potential();
  for (Method m : {Method::Hdg, Method::Mcs})
    for (int n : {r.opt.levels[0], r.opt.levels[1]}) {
      const RobustnessReport rep = pressure_robustness(m, n, r.opt.params, phi);
      const std::string tag = std::string(to_string(m)) + "_n" + std::to_string(n);
      r.add("robustness", "kinematic_change_" + tag, rep.kinematic_change, 1e-8);
      if (m == Method::Mcs) r.add("robustness", "stress_change_" + tag, rep.stress_change, 1e-8);
      r.add("robustness", "pressure_shift_" + tag, rep.pressure_shift_error, 1e-8);
    }
}

void convergence_checks(Runner& r) {
  for (Method m : {Method::Hdg, Method::Mcs}) {
    const ConvergenceReport rep = convergence_study(m, r.opt.levels, r.opt.params, r.progress);
    const int last = static_cast<int>(rep.levels.size()) - 1;
    for (const auto& col : rep.columns()) {
      const double e = rep.eoc(last, col);
      const double lo = col == "l2" ? 1.7 : 0.8, hi = col == "l2" ? 2.2 : 1.2;
      const std::string name = std::string(to_string(m)) + "_eoc_" + col;
      r.add("convergence", name + "_min", e, lo, false);
      r.add("convergence", name + "_max", e, hi);
    }
    for (const auto& lr : rep.levels)
      r.worst_div = std::max(r.worst_div, lr.coeff_scale > 0.0 ? lr.div_max / lr.coeff_scale : lr.div_max);
  }
}

}  // namespace

std::vector<Check> run_verification(const VerifyOptions& options, std::ostream* progress) {
  if (options.levels.size() < 2) throw std::invalid_argument("run_verification: need at least two levels");
  if (!std::is_sorted(options.levels.begin(), options.levels.end()) ||
      std::adjacent_find(options.levels.begin(), options.levels.end()) != options.levels.end())
    throw std::invalid_argument("run_verification: levels must be strictly increasing");
  if (options.samples < 1) throw std::invalid_argument("run_verification: samples must be positive");

  Runner r{options, progress, {}, 0.0};
  std::mt19937 rng(options.seed);
  const Mesh coarse_mesh = build_structured_cube(options.levels[0]);
  const Mesh fine_mesh = build_structured_cube(options.levels[1]);
  const FeSpaces coarse(coarse_mesh), fine(fine_mesh);

  interp_checks(r, coarse, rng);
  korn_checks(r, coarse, fine);
  norm_checks(r, coarse, fine);
  hdg_checks(r, coarse, fine, rng);
  mcs_checks(r, coarse, fine, rng);
  robustness_checks(r);
  if (options.levels.size() >= 3) convergence_checks(r);
  r.add("solve", "divergence_free", r.worst_div, 1e-10);
  return r.checks;
}

}  // namespace divstokes
