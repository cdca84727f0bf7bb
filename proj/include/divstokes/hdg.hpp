#ifndef DIVSTOKES_HDG_HPP
#define DIVSTOKES_HDG_HPP

#include "divstokes/system.hpp"

namespace divstokes {

struct HdgParams {
  double alpha = 6.0;
  double nu = 1e-4;
  HMode h_mode = HMode::Element;
};

using ElementMatrix24 = Eigen::Matrix<double, 24, 24>;

/// nu a^hdg restricted to tet t in the local ordering of FeSpaces (12 Vh,
/// 8 VhatH, 4 Wh), without orientation signs:
///   nu [ (eps z, eps v)_T
///        + sum_F (eps(z) n, Pi0 (vhat - v)_t)_F + (Pi0 (zhat - z)_t, eps(v) n)_F
///        + alpha / h_F (Pi0 (zhat - z)_t, Pi0 (vhat - v)_t)_F
///        + h_F ((curl z - theta)_n, (curl v - eta)_n)_F ].
/// For affine z, eps(z) n is constant on F, so the facet average is exact.
ElementMatrix24 hdg_element_matrix(const FeSpaces& fes, int t, const HdgParams& params);

/// Sparse kinematic block A in the reduced layout.
SparseMatrix assemble_hdg_operator(const FeSpaces& fes, const HdgParams& params);

SaddleSystem assemble_hdg(const FeSpaces& fes, const HdgParams& params, const ManufacturedSolution& data);

/// nu a^hdg(u, uhat, omega; u, uhat, omega) evaluated from the fields by
/// quadrature, independently of the assembled matrices.
double hdg_energy(const DiscreteField& u, const DiscreteField& uhat, const DiscreteField& omega,
                  const HdgParams& params);

StokesSolution solve_hdg(const SaddleSystem& system);

}  // namespace divstokes

#endif
