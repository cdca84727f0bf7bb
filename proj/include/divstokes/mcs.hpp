#ifndef DIVSTOKES_MCS_HPP
#define DIVSTOKES_MCS_HPP

#include <vector>

#include "divstokes/system.hpp"

namespace divstokes {

struct McsParams {
  double nu = 1e-4;
  /// Adds nu/3 (div u, div v), which vanishes for the exact solution.
  bool add_divdiv = false;
  /// Weight h_T in the vorticity term nu h_T^2 (div omega, div eta).
  HMode h_mode = HMode::Element;
};

/// Element blocks of the stress formulation on tet t, in the local orderings
/// of FeSpaces (16 stress functions; 12 Vh, 8 VhatH, 4 Wh), without
/// orientation signs:
///   mass(i, j)     = nu^-1 (tau_j, tau_i)_T
///   coupling(i, k) = -(tau_i, grad v_k - kappa(eta_k))_T + ((tau_i)_nt, (v_k - vhat_k)_t)_dT
///   kinematic      = nu h_T^2 (div eta, div eta') [+ nu/3 (div v, div v')]
struct McsElement {
  Eigen::MatrixXd mass;
  Eigen::MatrixXd coupling;
  Eigen::Matrix<double, 24, 24> kinematic;
};

McsElement mcs_element(const FeSpaces& fes, int t, const McsParams& params);

/// The full symmetric indefinite system over [stress | kinematic | pressure]:
///   [ M   B    0 ] [s]   [ 0 ]
///   [ B^T -C  -D ] [x] = [-F ]
///   [ 0   -D^T 0 ] [p]   [ 0 ]
/// with D = -(div v, q) as in SaddleSystem. The stress rows are element
/// local and can be condensed.
struct McsSystem {
  const FeSpaces* fes = nullptr;
  McsParams params;
  std::vector<McsElement> elements;
  SparseMatrix full;
  Eigen::VectorXd rhs;
  Eigen::VectorXd load;  ///< F in the kinematic layout
  int num_stress = 0;
  int num_kinematic = 0;
  int num_pressure = 0;
};

McsSystem assemble_mcs(const FeSpaces& fes, const McsParams& params, const ManufacturedSolution& data);

/// Reduced system after eliminating the stress per element, plus the local
/// recovery operators s_T = -recovery[t] x_T (x_T with signs applied).
struct CondensedMcs {
  SaddleSystem reduced;
  std::vector<Eigen::MatrixXd> recovery;
};

/// Throws NotPositiveDefiniteError if an element mass block is not SPD.
CondensedMcs condense_stress(const McsSystem& system);

/// Condensed kinematic block B^T M^-1 B + C for one element (24 x 24).
Eigen::Matrix<double, 24, 24> condensed_element(const McsElement& e);

/// Condensed kinematic block alone, without loads.
SparseMatrix assemble_mcs_operator(const FeSpaces& fes, const McsParams& params);

/// Solves via condensation and recovers the stress.
StokesSolution solve_mcs(const McsSystem& system);

/// Solves the uncondensed full system directly.
StokesSolution solve_mcs_full(const McsSystem& system);

/// Stress pairing in divergence form, evaluated by quadrature:
///   (div tau, v)_T - ((tau)_nn, v_n)_dT - ((tau)_nt, vhat_t)_dT + (tau, kappa(eta))_T
double stress_pairing(const DiscreteField& tau, const DiscreteField& v, const DiscreteField& vhat,
                      const DiscreteField& eta);

/// The same pairing after integration by parts, evaluated by quadrature:
///   -(tau, grad v - kappa(eta))_T + ((tau)_nt, (v - vhat)_t)_dT
double stress_pairing_compact(const DiscreteField& tau, const DiscreteField& v, const DiscreteField& vhat,
                              const DiscreteField& eta);

}  // namespace divstokes

#endif
