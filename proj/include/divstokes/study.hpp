#ifndef DIVSTOKES_STUDY_HPP
#define DIVSTOKES_STUDY_HPP

#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "divstokes/hdg.hpp"
#include "divstokes/mcs.hpp"

namespace divstokes {

enum class Method { Hdg, Mcs };

const char* to_string(Method m);

/// Errors of one solve against the exact fields, all in L2(Omega).
struct ErrorRow {
  int level = 0;
  int ntets = 0;
  double h = 0.0;
  double eps = 0.0;    ///< || eps(u - u_h) ||, eps taken elementwise
  double l2 = 0.0;     ///< || u - u_h ||
  double omega = 0.0;  ///< || omega - omega_h ||
  double p = 0.0;      ///< || p - p_h ||
  std::optional<double> sigma;  ///< || sigma - sigma_h || (stress methods only)
};

/// Quadrature of degree 12 (exact field degree plus discrete degree for the
/// manufactured solution). Fields must live on the same FeSpaces.
ErrorRow error_norms(const StokesSolution& s, const ManufacturedSolution& exact);

/// log(e_coarse / e_fine) / log(h_coarse / h_fine).
double eoc(double e_coarse, double e_fine, double h_coarse, double h_fine);

struct LevelRun {
  ErrorRow errors;
  double div_max = 0.0;
  double coeff_scale = 0.0;
  SolveStats stats;
  double seconds = 0.0;
};

struct ConvergenceReport {
  Method method = Method::Hdg;
  std::vector<LevelRun> levels;

  /// Column names: eps, l2, omega, p, sigma.
  std::vector<std::string> columns() const;
  double error(int level_index, const std::string& column) const;
  /// NaN for the first level.
  double eoc(int level_index, const std::string& column) const;
};

struct StudyParams {
  double nu = 1e-4;
  double alpha = 6.0;
  HMode h_mode = HMode::Element;
  bool add_divdiv = false;

  HdgParams hdg() const { return {alpha, nu, h_mode}; }
  McsParams mcs() const { return {nu, add_divdiv, h_mode}; }
};

StokesSolution solve_method(const FeSpaces& fes, Method method, const StudyParams& params,
                            const ManufacturedSolution& data);

/// Manufactured-solution runs on the structured cube meshes with n = levels[i]
/// and the Neumann face at x = 0. `progress` receives one line per level.
ConvergenceReport convergence_study(Method method, const std::vector<int>& levels, const StudyParams& params,
                                    std::ostream* progress = nullptr);

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

struct RobustnessReport {
  Method method = Method::Hdg;
  int level = 0;
  double kinematic_change = 0.0;  ///< || x_perturbed - x || / || x || over (u, uhat, omega)
  double stress_change = 0.0;     ///< same for sigma (stress methods), else 0
  double pressure_shift_error = 0.0;  ///< || (p'_h - p_h) - I_Q phi || / || I_Q phi ||
  double div_max = 0.0;
};

/// Solves with f and with f + grad(phi), p + phi (Neumann data adjusted).
RobustnessReport pressure_robustness(Method method, int level, const StudyParams& params, const MultiPoly& phi);

/// Default gradient perturbation 10 (x^5 + y^5 + z^5).
MultiPoly default_pressure_potential();

struct ConditionRow {
  int level = 0;
  int ntets = 0;
  double alpha = 0.0;
  double cond_hdg = 0.0;  ///< +inf if A(alpha) is not positive definite
  double cond_mcs = 0.0;
};

/// Condition numbers of the HDG block A(alpha) for every alpha and of the
/// condensed stress-method block with the div-div term, per level.
std::vector<ConditionRow> condition_study(const std::vector<int>& levels, const std::vector<double>& alphas,
                                          const StudyParams& params, std::ostream* progress = nullptr);

void write_condition_csv(std::ostream& out, const std::vector<ConditionRow>& rows);

/// cond(A) of an SPD block, +inf if it is not positive definite.
double condition_number(const SparseMatrix& a);

/// Residual of the discrete equations at the interpolated exact solution,
/// measured in the dual norm of the method's energy:
///   HDG: r = A x_I + B p_I - F,  sqrt(r^T A^-1 r);
///   stress method: r = K y_I - b over (sigma, x, p) and
///   sqrt(r^T P^-1 r) with P = diag(M, A + nu/3 divdiv, nu^-1 pressure mass).
double consistency_residual(Method method, int level, const StudyParams& params);

/// Header lines starting with '#'.
void write_comment_header(std::ostream& out, const std::vector<std::string>& lines);

/// "%.5e", or "nan" / "inf".
std::string format_float(double v);

}  // namespace divstokes

#endif
