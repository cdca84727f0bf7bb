#ifndef DIVSTOKES_POLYCALC_HPP
#define DIVSTOKES_POLYCALC_HPP

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace divstokes {

using Exponent = std::array<int, 3>;

/// Polynomial in (x, y, z) stored as a sorted list of nonzero monomials.
/// All operations act on coefficients exactly (no sampling or quadrature).
class MultiPoly {
public:
  struct Term {
    Exponent exp;
    double coeff;
  };

  MultiPoly() = default;
  static MultiPoly constant(double c);
  static MultiPoly monomial(int i, int j, int k, double c = 1.0);
  /// x, y or z for axis 0, 1, 2.
  static MultiPoly coordinate(int axis);

  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  double max_abs_coefficient() const;
  double coefficient(const Exponent& e) const;
  const std::vector<Term>& terms() const { return terms_; }

  double operator()(const Eigen::Vector3d& x) const;
  MultiPoly derivative(int axis) const;

  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(double s);
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
  friend MultiPoly operator*(MultiPoly a, double s) { return a *= s; }
  friend MultiPoly operator*(double s, MultiPoly a) { return a *= s; }
  friend MultiPoly operator-(MultiPoly a) { return a *= -1.0; }
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);

private:
  explicit MultiPoly(std::vector<Term> terms);
  void normalize();

  std::vector<Term> terms_;
};

using VecPoly = std::array<MultiPoly, 3>;
using MatPoly = std::array<std::array<MultiPoly, 3>, 3>;

VecPoly operator+(const VecPoly& a, const VecPoly& b);
VecPoly operator-(const VecPoly& a, const VecPoly& b);
VecPoly operator*(double s, const VecPoly& a);
MatPoly operator+(const MatPoly& a, const MatPoly& b);
MatPoly operator-(const MatPoly& a, const MatPoly& b);
MatPoly operator*(double s, const MatPoly& a);

Eigen::Vector3d evaluate(const VecPoly& v, const Eigen::Vector3d& x);
Eigen::Matrix3d evaluate(const MatPoly& m, const Eigen::Vector3d& x);
int degree(const VecPoly& v);
int degree(const MatPoly& m);
double max_abs_coefficient(const VecPoly& v);
double max_abs_coefficient(const MatPoly& m);

VecPoly grad(const MultiPoly& p);
VecPoly curl(const VecPoly& v);
MultiPoly div(const VecPoly& v);
/// Row-wise divergence of a matrix field.
VecPoly div(const MatPoly& t);
/// (grad v)_ij = d v_i / d x_j.
MatPoly gradient(const VecPoly& v);
MatPoly eps(const VecPoly& v);
MatPoly transpose(const MatPoly& t);
MultiPoly trace(const MatPoly& t);
MatPoly dev(const MatPoly& t);
MatPoly kappa(const VecPoly& v);
MatPoly identity_times(const MultiPoly& p);

/// Polynomial exact solution of the Stokes problem on the unit cube with all
/// derived fields: u = curl(psi, psi, psi) for psi = x^2(x-1)^2 y^2(y-1)^2 z^2(z-1)^2,
/// sigma = nu eps(u), p = x^5 + y^5 + z^5 - 1/2, f = -div sigma + grad p.
struct ManufacturedSolution {
  double nu = 1.0;
  MultiPoly psi;
  VecPoly u;
  VecPoly omega;
  MatPoly sigma;
  MultiPoly pressure;
  VecPoly f;
};

ManufacturedSolution build_manufactured(double nu);

/// Same velocity, pressure shifted by phi and forcing by grad phi.
ManufacturedSolution with_pressure_potential(const ManufacturedSolution& ms, const MultiPoly& phi);

/// Viscosity, stress, pressure and forcing all multiplied by `factor`.
ManufacturedSolution scaled(const ManufacturedSolution& ms, double factor);

/// A linear velocity field u = a + G x with its consistent data (useful for
/// exactness checks). f = grad p since div sigma vanishes for linear u.
ManufacturedSolution linear_solution(const Eigen::Vector3d& a, const Eigen::Matrix3d& g, double nu,
                                     const MultiPoly& pressure);

/// Boundary data for a flat Neumann part with unit outward normal n:
/// g_nn = n^T sigma n - p and g_nt = sigma n - (n^T sigma n) n.
struct NeumannData {
  MultiPoly g_nn;
  VecPoly g_nt;
};

NeumannData neumann_data(const MatPoly& sigma, const MultiPoly& pressure, const Eigen::Vector3d& normal);
NeumannData neumann_data(const ManufacturedSolution& ms, const Eigen::Vector3d& normal);

}  // namespace divstokes

#endif
