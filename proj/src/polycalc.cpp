#include "divstokes/polycalc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace divstokes {

MultiPoly::MultiPoly(std::vector<Term> terms) : terms_(std::move(terms)) { normalize(); }

void MultiPoly::normalize() {
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.exp < b.exp; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().exp == t.exp)
      merged.back().coeff += t.coeff;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const Term& t) { return t.coeff == 0.0; });
  terms_ = std::move(merged);
}

MultiPoly MultiPoly::constant(double c) { return MultiPoly({{{0, 0, 0}, c}}); }

MultiPoly MultiPoly::monomial(int i, int j, int k, double c) { return MultiPoly({{{i, j, k}, c}}); }

MultiPoly MultiPoly::coordinate(int axis) {
  Exponent e{0, 0, 0};
  e[axis] = 1;
  return MultiPoly({{e, 1.0}});
}

int MultiPoly::degree() const {
  int d = -1;
  for (const auto& t : terms_) d = std::max(d, t.exp[0] + t.exp[1] + t.exp[2]);
  return d;
}

double MultiPoly::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
  return m;
}

double MultiPoly::coefficient(const Exponent& e) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), e, [](const Term& t, const Exponent& x) { return t.exp < x; });
  return it != terms_.end() && it->exp == e ? it->coeff : 0.0;
}

double MultiPoly::operator()(const Eigen::Vector3d& x) const {
  if (terms_.empty()) return 0.0;
  int maxe = 0;
  for (const auto& t : terms_) maxe = std::max({maxe, t.exp[0], t.exp[1], t.exp[2]});
  // powers[axis][k] = x_axis^k
  std::array<std::array<double, 32>, 3> powers;
  const int np = std::min(maxe, 31);
  for (int a = 0; a < 3; ++a) {
    powers[a][0] = 1.0;
    for (int k = 1; k <= np; ++k) powers[a][k] = powers[a][k - 1] * x[a];
  }
  double s = 0.0;
  for (const auto& t : terms_) {
    if (t.exp[0] > 31 || t.exp[1] > 31 || t.exp[2] > 31)
      s += t.coeff * std::pow(x[0], t.exp[0]) * std::pow(x[1], t.exp[1]) * std::pow(x[2], t.exp[2]);
    else
      s += t.coeff * powers[0][t.exp[0]] * powers[1][t.exp[1]] * powers[2][t.exp[2]];
  }
  return s;
}

MultiPoly MultiPoly::derivative(int axis) const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (t.exp[axis] == 0) continue;
    Term d = t;
    d.coeff *= t.exp[axis];
    --d.exp[axis];
    out.push_back(d);
  }
  return MultiPoly(std::move(out));
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  normalize();
  return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
  for (const auto& t : o.terms_) terms_.push_back({t.exp, -t.coeff});
  normalize();
  return *this;
}

MultiPoly& MultiPoly::operator*=(double s) {
  for (auto& t : terms_) t.coeff *= s;
  if (s == 0.0) terms_.clear();
  return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  std::map<Exponent, double> acc;
  for (const auto& s : a.terms_)
    for (const auto& t : b.terms_)
      acc[{s.exp[0] + t.exp[0], s.exp[1] + t.exp[1], s.exp[2] + t.exp[2]}] += s.coeff * t.coeff;
  std::vector<MultiPoly::Term> out;
  out.reserve(acc.size());
  for (const auto& [e, c] : acc) out.push_back({e, c});
  return MultiPoly(std::move(out));
}

VecPoly operator+(const VecPoly& a, const VecPoly& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
VecPoly operator-(const VecPoly& a, const VecPoly& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
VecPoly operator*(double s, const VecPoly& a) { return {s * a[0], s * a[1], s * a[2]}; }

MatPoly operator+(const MatPoly& a, const MatPoly& b) {
  MatPoly r;
  for (int i = 0; i < 3; ++i) r[i] = a[i] + b[i];
  return r;
}

MatPoly operator-(const MatPoly& a, const MatPoly& b) {
  MatPoly r;
  for (int i = 0; i < 3; ++i) r[i] = a[i] - b[i];
  return r;
}

MatPoly operator*(double s, const MatPoly& a) {
  MatPoly r;
  for (int i = 0; i < 3; ++i) r[i] = s * a[i];
  return r;
}

Eigen::Vector3d evaluate(const VecPoly& v, const Eigen::Vector3d& x) { return {v[0](x), v[1](x), v[2](x)}; }

Eigen::Matrix3d evaluate(const MatPoly& m, const Eigen::Vector3d& x) {
  Eigen::Matrix3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m[i][j](x);
  return r;
}

int degree(const VecPoly& v) { return std::max({v[0].degree(), v[1].degree(), v[2].degree()}); }

int degree(const MatPoly& m) { return std::max({degree(m[0]), degree(m[1]), degree(m[2])}); }

double max_abs_coefficient(const VecPoly& v) {
  return std::max({v[0].max_abs_coefficient(), v[1].max_abs_coefficient(), v[2].max_abs_coefficient()});
}

double max_abs_coefficient(const MatPoly& m) {
  return std::max({max_abs_coefficient(m[0]), max_abs_coefficient(m[1]), max_abs_coefficient(m[2])});
}

VecPoly grad(const MultiPoly& p) { return {p.derivative(0), p.derivative(1), p.derivative(2)}; }

VecPoly curl(const VecPoly& v) {
  return {v[2].derivative(1) - v[1].derivative(2), v[0].derivative(2) - v[2].derivative(0),
          v[1].derivative(0) - v[0].derivative(1)};
}

MultiPoly div(const VecPoly& v) { return v[0].derivative(0) + v[1].derivative(1) + v[2].derivative(2); }

VecPoly div(const MatPoly& t) { return {div(t[0]), div(t[1]), div(t[2])}; }

MatPoly gradient(const VecPoly& v) {
  MatPoly g;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g[i][j] = v[i].derivative(j);
  return g;
}

MatPoly transpose(const MatPoly& t) {
  MatPoly r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = t[j][i];
  return r;
}

MatPoly eps(const VecPoly& v) {
  MatPoly g = gradient(v);
  return 0.5 * (g + transpose(g));
}

MultiPoly trace(const MatPoly& t) { return t[0][0] + t[1][1] + t[2][2]; }

MatPoly identity_times(const MultiPoly& p) {
  MatPoly r;
  for (int i = 0; i < 3; ++i) r[i][i] = p;
  return r;
}

MatPoly dev(const MatPoly& t) { return t - identity_times((1.0 / 3.0) * trace(t)); }

MatPoly kappa(const VecPoly& v) {
  MatPoly k;
  k[0][1] = -0.5 * v[2];
  k[0][2] = 0.5 * v[1];
  k[1][0] = 0.5 * v[2];
  k[1][2] = -0.5 * v[0];
  k[2][0] = -0.5 * v[1];
  k[2][1] = 0.5 * v[0];
  return k;
}

namespace {

// t^2 (t - 1)^2 = t^4 - 2 t^3 + t^2 in the given variable
MultiPoly bump(int axis) {
  auto m = [axis](int k, double c) {
    Exponent e{0, 0, 0};
    e[axis] = k;
    return MultiPoly::monomial(e[0], e[1], e[2], c);
  };
  return m(4, 1.0) + m(3, -2.0) + m(2, 1.0);
}

ManufacturedSolution complete(double nu, MultiPoly psi, VecPoly u, MultiPoly pressure) {
  ManufacturedSolution ms;
  ms.nu = nu;
  ms.psi = std::move(psi);
  ms.u = std::move(u);
  ms.omega = curl(ms.u);
  ms.sigma = nu * eps(ms.u);
  ms.pressure = std::move(pressure);
  ms.f = grad(ms.pressure) - div(ms.sigma);
  return ms;
}

}  // namespace

ManufacturedSolution build_manufactured(double nu) {
  if (!(nu > 0.0)) throw std::invalid_argument("build_manufactured: nu must be positive");
  MultiPoly psi = bump(0) * bump(1) * bump(2);
  VecPoly u = curl(VecPoly{psi, psi, psi});
  MultiPoly p = MultiPoly::monomial(5, 0, 0) + MultiPoly::monomial(0, 5, 0) + MultiPoly::monomial(0, 0, 5) +
                MultiPoly::constant(-0.5);
  ManufacturedSolution ms = complete(nu, std::move(psi), std::move(u), std::move(p));
  if (ms.psi.degree() != 12 || degree(ms.u) != 11 || degree(ms.sigma) != 10 || degree(ms.f) != 9 ||
      ms.pressure.degree() != 5)
    throw std::logic_error("build_manufactured: unexpected polynomial degrees");
  return ms;
}

ManufacturedSolution with_pressure_potential(const ManufacturedSolution& ms, const MultiPoly& phi) {
  ManufacturedSolution r = ms;
  r.pressure += phi;
  r.f = r.f + grad(phi);
  return r;
}

ManufacturedSolution scaled(const ManufacturedSolution& ms, double factor) {
  ManufacturedSolution r = ms;
  r.nu *= factor;
  r.sigma = factor * ms.sigma;
  r.pressure = factor * ms.pressure;
  r.f = factor * ms.f;
  return r;
}

ManufacturedSolution linear_solution(const Eigen::Vector3d& a, const Eigen::Matrix3d& g, double nu,
                                     const MultiPoly& pressure) {
  VecPoly u;
  for (int i = 0; i < 3; ++i) {
    u[i] = MultiPoly::constant(a[i]);
    for (int j = 0; j < 3; ++j) u[i] += g(i, j) * MultiPoly::coordinate(j);
  }
  return complete(nu, MultiPoly{}, std::move(u), pressure);
}

NeumannData neumann_data(const MatPoly& sigma, const MultiPoly& pressure, const Eigen::Vector3d& n) {
  VecPoly sn;
  for (int i = 0; i < 3; ++i) sn[i] = n[0] * sigma[i][0] + n[1] * sigma[i][1] + n[2] * sigma[i][2];
  MultiPoly snn = n[0] * sn[0] + n[1] * sn[1] + n[2] * sn[2];
  NeumannData d;
  d.g_nn = snn - pressure;
  for (int i = 0; i < 3; ++i) d.g_nt[i] = sn[i] - n[i] * snn;
  return d;
}

NeumannData neumann_data(const ManufacturedSolution& ms, const Eigen::Vector3d& normal) {
  return neumann_data(ms.sigma, ms.pressure, normal);
}

}  // namespace divstokes
