#ifndef DIVSTOKES_SYSTEM_HPP
#define DIVSTOKES_SYSTEM_HPP

#include <optional>
#include <string>

#include "divstokes/interp.hpp"
#include "divstokes/polycalc.hpp"
#include "divstokes/sparsela.hpp"

namespace divstokes {

/// Mesh-size weight h in the stabilization terms.
///   Element:  (6|T|)^(1/3) of the tet whose boundary term is assembled
///   PerFacet: facet diameter (element diameter for element-only terms)
///   Global:   maximal element diameter
enum class HMode { Element, PerFacet, Global };

const char* to_string(HMode m);
/// Inverse of to_string; throws std::invalid_argument on unknown names.
HMode parse_hmode(const std::string& name);

/// Reduced saddle-point system over the kinematic layout of FeSpaces and one
/// pressure per tet:
///   [ A   B ] [x]   [rhs_kinematic]
///   [ B^T 0 ] [p] = [rhs_pressure ]
/// with B = -(div v, q). Dirichlet dofs are eliminated.
struct SaddleSystem {
  const FeSpaces* fes = nullptr;
  SparseMatrix A;
  SparseMatrix B;
  Eigen::VectorXd rhs_kinematic;
  Eigen::VectorXd rhs_pressure;

  int num_kinematic() const { return A.rows(); }
  int num_pressure() const { return B.cols(); }
  SparseMatrix saddle() const;
  Eigen::VectorXd saddle_rhs() const;
};

struct StokesSolution {
  DiscreteField u, uhat, omega, p;
  std::optional<DiscreteField> sigma;
  SolveStats stats;
  double div_max = 0.0;      ///< max over tets of |div u_h|
  double coeff_scale = 0.0;  ///< max |coefficient| of u_h
};

/// Right-hand side in the kinematic layout: (f, v) plus the Neumann terms
/// int_{Gamma_N} (sigma_nn - p) v_n and int_{Gamma_N} sigma_nt . vhat.
Eigen::VectorXd assemble_load(const FeSpaces& fes, const ManufacturedSolution& data);

/// Pressure coupling -(div v, q) in the kinematic x pressure layout.
SparseMatrix assemble_divergence(const FeSpaces& fes);

/// Solves the saddle system and unpacks the fields.
StokesSolution solve_saddle(const SaddleSystem& system);

/// Weight h for the boundary term of tet t on its facet f.
double facet_weight(const Mesh& mesh, int t, int f, HMode mode);

/// Weight h for element-only terms of tet t.
double element_weight(const Mesh& mesh, int t, HMode mode);

}  // namespace divstokes

#endif
