#ifndef DIVSTOKES_VERIFY_HPP
#define DIVSTOKES_VERIFY_HPP

#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "divstokes/study.hpp"
#include "divstokes/suites.hpp"

namespace divstokes {

struct Check {
  std::string group;
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool upper = true;  ///< pass iff value <= bound, else value >= bound
  bool passed = false;
};

Check make_check(std::string group, std::string name, double value, double bound, bool upper = true);

struct VerifyOptions {
  std::vector<int> levels{2, 4};  ///< at least two; convergence checks run when three or more are given
  unsigned seed = 7;
  int samples = 100;
  StudyParams params;
};

/// Runs the sampling suites, interpolation, assembly and solver invariants on
/// the given levels. Deterministic for a fixed seed.
std::vector<Check> run_verification(const VerifyOptions& options, std::ostream* progress = nullptr);

bool all_passed(const std::vector<Check>& checks);

void write_checks_csv(std::ostream& out, const std::vector<Check>& checks);

/// Random polynomial vector field with every monomial of total degree <= degree
/// and standard normal coefficients.
VecPoly random_vector_polynomial(int degree, std::mt19937& rng);

/// max |div(I_V u) - I_Q(div u)| over tets, divided by max(1, max |I_Q div u|).
double commuting_defect(const FeSpaces& fes, const VecPoly& u);

/// max |I(f) - f| / max |f| for a random discrete field f of the space,
/// interpolated back from its pointwise values (affine degree). SigmaH needs a
/// single-tet mesh since its traces are not continuous between elements.
double idempotence_defect(const FeSpaces& fes, SpaceTag space, std::mt19937& rng);

/// Solves for the exact field u = (0, x, 0), constant pressure, on the n^3 cube
/// with Dirichlet data only on x = 0 (where u vanishes); returns the largest
/// of the error norms of error_norms().
double linear_reproduction_error(int n, Method method, const StudyParams& params);

/// || Pi0 (u_h)_t ||_{Gamma_D}.
double dirichlet_tangential_mean(const DiscreteField& u);

/// max over interior facets and both tangents of |int_F [sigma_nt] . t| / (|F| max |sigma coeff|).
double stress_nt_jump(const DiscreteField& sigma);

/// max over tets of |tr sigma_h(x)| at the vertices, relative to the coefficient scale.
double stress_trace_defect(const DiscreteField& sigma);

}  // namespace divstokes

#endif
