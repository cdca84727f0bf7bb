#ifndef DIVSTOKES_SUITES_HPP
#define DIVSTOKES_SUITES_HPP

#include <limits>
#include <random>

#include "divstokes/interp.hpp"
#include "divstokes/polycalc.hpp"

namespace divstokes {

// Sampling suites for the discrete Korn inequalities and the equivalences of
// the kinematic norms. The mesh size h is the maximal element diameter.

/// Running minimum and maximum of a sampled ratio.
struct Bracket {
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  int count = 0;

  void add(double v);
  /// Largest relative change of either endpoint, max(|o.min/min - 1|, |o.max/max - 1|).
  double variation(const Bracket& other) const;
};

/// Per-facet quantities of the tangential jump g = [u]_t of a Vh field
/// (the trace on boundary facets; u_- minus u_+ in facet_sides order).
struct FacetJump {
  double mean_sq = 0.0;       ///< || Pi0 g ||_F^2
  double rigid_sq = 0.0;      ///< || PiR g ||_F^2, PiR the projection onto tangential rigid motions
  double full_sq = 0.0;       ///< || g ||_F^2
  double rotation = 0.0;      ///< || (PiR - Pi0) g ||_F from the projection
  double rotation_formula = 0.0;  ///< | (r_F, [u])_F | / || r_F ||_F, r_F = n x (x - x_F)
  double curl_jump_sq = 0.0;  ///< || [curl u]_n ||_F^2
};

FacetJump facet_jump(const DiscreteField& u, int f);

/// | (r_F, w)_F - (r_F, eps(w)(x - x_F))_F - 1/2 (|x - x_F|^2, n.curl w)_F |
/// for w = u restricted to tet t on its local facet i, divided by ||r_F|| ||w||_F.
double rotation_identity_defect(const DiscreteField& u, int t, int i);

/// Sums over interior and Dirichlet facets.
struct KornTerms {
  double grad_sq = 0.0;        ///< || grad u ||_T^2
  double eps_sq = 0.0;         ///< || eps(u) ||_T^2
  double rigid_jump = 0.0;     ///< h^-1 || PiR [u]_t ||^2
  double mean_jump = 0.0;      ///< h^-1 || Pi0 [u]_t ||^2
  double curl_jump = 0.0;      ///< h || [curl u]_n ||^2
};

KornTerms korn_terms(const DiscreteField& u);

/// Squared kinematic norms of a triple (u, uhat, omega); element-boundary
/// sums run over every facet of every tet.
struct KinematicNorms {
  double grad = 0.0;    ///< ||grad u||^2 + h^-1 ||Pi0 (u - uhat)_t||^2
  double triple = 0.0;  ///< ||eps u||^2 + h^-1 ||Pi0 (u - uhat)_t||^2 + h ||(curl u - omega)_n||^2
  double eps = 0.0;     ///< ||eps u||^2 + h^-1 ||Pi0 (u - uhat)_t||^2 + ||curl u - omega||^2
  double stress = 0.0;  ///< ||dev grad u - Pi0 kappa(omega)||^2 + h^-1 ||Pi0 (u - uhat)_t||^2
  double div_u = 0.0;   ///< ||div u||^2
  double div_omega = 0.0;  ///< h^2 ||div omega||^2
};

KinematicNorms kinematic_norms(const DiscreteField& u, const DiscreteField& uhat, const DiscreteField& omega);

/// The Wh field with n.omega = n.{curl u} on non-Dirichlet facets (mean of
/// both sides on interior ones) and zero normal trace on Dirichlet facets.
DiscreteField averaged_curl(const DiscreteField& u);

/// Unit-variance coefficients with Dirichlet-masked entries zeroed.
DiscreteField random_field(const FeSpaces& fes, SpaceTag space, std::mt19937& rng);

struct KornStats {
  int samples = 0;
  Bracket grad_bound;        ///< ||grad u||^2 / (||eps u||^2 + rigid_jump)
  Bracket jump_equivalence;  ///< (eps + rigid_jump) / (eps + mean_jump + curl_jump)
  Bracket hdg_korn;          ///< grad / triple norm, random omega
  Bracket hdg_korn_reverse;  ///< triple norm with averaged_curl(u) / grad
  double rotation_defect = 0.0;   ///< max relative | rotation - rotation_formula |
  double identity_defect = 0.0;   ///< max rotation_identity_defect
  double chain_violation = 0.0;   ///< max of (Pi0 - PiR)_+ and (PiR - full)_+, relative
};

KornStats korn_suite(const FeSpaces& fes, int samples, unsigned seed);

struct NormEquivalenceStats {
  int samples = 0;
  Bracket curl_normal;    ///< ||curl u - omega||_T^2 / h ||(curl u - omega)_n||_dT^2
  Bracket curl_kappa;     ///< ||curl kappa(omega)||_T^2 / ||div omega||_T^2
  Bracket kappa_h1;       ///< |kappa(omega)|_{H1(T)}^2 / ||div omega||_T^2
  Bracket elementwise;    ///< (||eps u||^2 + ||curl u - omega||^2) / (||dev grad u - Pi0 kappa||^2 + h^2||div omega||^2 + ||div u||^2) on T
  Bracket triple_vs_eps;  ///< triple / eps norm
  Bracket eps_vs_stress;  ///< eps / (stress + div_u + div_omega)
  double pythagoras_defect = 0.0;  ///< max relative defect of ||eps||^2 + 1/2||curl u - omega||^2 = ||dev grad u - kappa||^2 + 1/3||div u||^2
};

NormEquivalenceStats norm_equivalence_suite(const FeSpaces& fes, int samples, unsigned seed);

/// Square roots of the interpolation error sums
///   kinematic: triple(z) + grad(z) + h ||eps(z)_nt||_dT^2 with z = (u - I_V u, u_t - I_Vhat u, omega - I_W omega),
///   stress:    ||sigma - I_Sigma sigma||^2 + h ||(sigma - I_Sigma sigma)_nt||_dT^2.
struct InterpolationErrors {
  double kinematic = 0.0;
  double stress = 0.0;
};

InterpolationErrors interpolation_errors(const FeSpaces& fes, const ManufacturedSolution& ms);

}  // namespace divstokes

#endif
