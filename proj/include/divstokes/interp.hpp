#ifndef DIVSTOKES_INTERP_HPP
#define DIVSTOKES_INTERP_HPP

#include <functional>

#include "divstokes/fespaces.hpp"
#include "divstokes/polycalc.hpp"

namespace divstokes {

using VectorFunction = std::function<Vec3(const Vec3&)>;
using MatrixFunction = std::function<Mat3(const Vec3&)>;
using ScalarFunction = std::function<double(const Vec3&)>;

/// Coefficients of a member of one discrete space, in its global numbering.
/// Dirichlet-masked coefficients are stored like all others.
struct DiscreteField {
  SpaceTag space = SpaceTag::Qh;
  const FeSpaces* fes = nullptr;
  Eigen::VectorXd coeffs;
};

DiscreteField zero_field(const FeSpaces& fes, SpaceTag space);

/// Field restricted to tet t (Vh or Wh), orientation signs applied.
AffineVector local_vector(const DiscreteField& field, int t);
/// Stress field restricted to tet t.
AffineMatrix local_matrix(const DiscreteField& field, int t);
/// Tangential facet value of a VhatH field (zero on Dirichlet facets).
Vec3 facet_value(const DiscreteField& field, int f);
/// Element value of a Qh field.
double element_value(const DiscreteField& field, int t);

// The `degree` arguments are the polynomial degree of the input, used to pick
// quadrature exact for the moment integrals (capped at the maximum rule).

/// Facet moments of the normal trace against P1(F).
DiscreteField interp_V(const FeSpaces& fes, const VectorFunction& u, int degree);
DiscreteField interp_V(const FeSpaces& fes, const VecPoly& u);
/// Facet averages of the normal trace.
DiscreteField interp_W(const FeSpaces& fes, const VectorFunction& w, int degree);
DiscreteField interp_W(const FeSpaces& fes, const VecPoly& w);
/// Facet averages of the tangential part, on non-Dirichlet facets.
DiscreteField interp_Vhat(const FeSpaces& fes, const VectorFunction& u, int degree);
DiscreteField interp_Vhat(const FeSpaces& fes, const VecPoly& u);
/// Element averages.
DiscreteField interp_Q(const FeSpaces& fes, const ScalarFunction& p, int degree);
DiscreteField interp_Q(const FeSpaces& fes, const MultiPoly& p);
/// Facet nt-moments against tangential constants and element moments against
/// constant deviatoric matrices. Input should be trace-free.
DiscreteField interp_Sigma(const FeSpaces& fes, const MatrixFunction& sigma, int degree);
DiscreteField interp_Sigma(const FeSpaces& fes, const MatPoly& sigma);

/// Pointwise divergence of a Vh field per tet, as a Qh field.
DiscreteField divergence(const DiscreteField& v);

/// Kinematic triple packed into the reduced layout [Vh free | VhatH | Wh free].
Eigen::VectorXd pack_kinematic(const DiscreteField& u, const DiscreteField& uhat, const DiscreteField& omega);
/// Inverse of pack_kinematic; masked coefficients are set to zero.
void unpack_kinematic(const FeSpaces& fes, const Eigen::VectorXd& x, DiscreteField& u, DiscreteField& uhat,
                      DiscreteField& omega);

}  // namespace divstokes

#endif
