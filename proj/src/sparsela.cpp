#include "divstokes/sparsela.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace divstokes {

SparseMatrix::SparseMatrix(int rows, int cols, const std::vector<Triplet>& entries, bool symmetric)
    : m_(rows, cols), symmetric_(symmetric) {
  m_.setFromTriplets(entries.begin(), entries.end());
  m_.makeCompressed();
}

SparseMatrix::SparseMatrix(Storage m, bool symmetric) : m_(std::move(m)), symmetric_(symmetric) { m_.makeCompressed(); }

double SparseMatrix::symmetry_defect() const {
  if (rows() != cols()) return INFINITY;
  const Storage d = m_ - Storage(m_.transpose());
  double r = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (Storage::InnerIterator it(d, k); it; ++it) r = std::max(r, std::abs(it.value()));
  return r;
}

struct DirectSolver::Impl {
  using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;
  const SparseMatrix* original = nullptr;
  Eigen::VectorXd scale;
  bool dense = false;
  Eigen::PartialPivLU<Eigen::MatrixXd> dense_lu;
  Eigen::SparseLU<ColMatrix, Eigen::COLAMDOrdering<int>> sparse_lu;

  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& r) const {
    const Eigen::VectorXd b = scale.cwiseProduct(r);
    const Eigen::VectorXd y = dense ? Eigen::VectorXd(dense_lu.solve(b)) : Eigen::VectorXd(sparse_lu.solve(b));
    return scale.cwiseProduct(y);
  }
};

DirectSolver::DirectSolver(const SparseMatrix& m) : impl_(std::make_unique<Impl>()) {
  if (m.rows() != m.cols()) throw std::invalid_argument("DirectSolver: matrix is not square");
  const int n = m.rows();
  impl_->original = &m;
  // Symmetric equilibration D A D with D_ii = 1 / sqrt(max_j |a_ij|).
  impl_->scale = Eigen::VectorXd::Ones(n);
  const auto& s = m.storage();
  for (int i = 0; i < n; ++i) {
    double mx = 0.0;
    for (SparseMatrix::Storage::InnerIterator it(s, i); it; ++it) mx = std::max(mx, std::abs(it.value()));
    if (mx == 0.0) throw SingularSystemError("DirectSolver: empty row " + std::to_string(i), i);
    impl_->scale[i] = 1.0 / std::sqrt(mx);
  }
  Impl::ColMatrix scaled = impl_->scale.asDiagonal() * Impl::ColMatrix(s) * impl_->scale.asDiagonal();
  scaled.makeCompressed();
  impl_->dense = n < kDenseSolveThreshold;
  if (impl_->dense) {
    Eigen::MatrixXd d(scaled);
    impl_->dense_lu.compute(d);
    // Partial pivoting does not report singularity; look for a vanishing pivot.
    const Eigen::MatrixXd& lu = impl_->dense_lu.matrixLU();
    for (int i = 0; i < n; ++i)
      if (std::abs(lu(i, i)) < 1e-14)
        throw SingularSystemError("DirectSolver: zero pivot at elimination step " + std::to_string(i), i);
  } else {
    impl_->sparse_lu.analyzePattern(scaled);
    impl_->sparse_lu.factorize(scaled);
    if (impl_->sparse_lu.info() != Eigen::Success)
      throw SingularSystemError("DirectSolver: " + impl_->sparse_lu.lastErrorMessage(), -1);
  }
}

DirectSolver::~DirectSolver() = default;

namespace {

// rhs - m x with long double accumulation. Saddle systems with a dominant
// gradient load lose the small viscous part of the residual to cancellation
// in double precision.
Eigen::VectorXd residual(const SparseMatrix& m, const Eigen::VectorXd& x, const Eigen::VectorXd& rhs) {
  const auto& s = m.storage();
  Eigen::VectorXd r(rhs.size());
  for (int i = 0; i < s.outerSize(); ++i) {
    long double acc = rhs[i];
    for (SparseMatrix::Storage::InnerIterator it(s, i); it; ++it)
      acc -= static_cast<long double>(it.value()) * x[it.col()];
    r[i] = static_cast<double>(acc);
  }
  return r;
}

}  // namespace

Eigen::VectorXd DirectSolver::solve(const Eigen::VectorXd& rhs, SolveStats* stats) const {
  const SparseMatrix& m = *impl_->original;
  const double bnorm = rhs.norm();
  Eigen::VectorXd x = impl_->apply_inverse(rhs);
  Eigen::VectorXd r = residual(m, x, rhs);
  double rel = bnorm > 0.0 ? r.norm() / bnorm : r.norm();
  int steps = 0;
  while (rel > 1e-16 && steps < 4) {
    const Eigen::VectorXd xn = x + impl_->apply_inverse(r);
    const Eigen::VectorXd rn = residual(m, xn, rhs);
    const double reln = bnorm > 0.0 ? rn.norm() / bnorm : rn.norm();
    ++steps;
    if (!(reln < rel)) break;
    x = xn;
    r = rn;
    rel = reln;
  }
  if (stats) {
    stats->dimension = m.rows();
    stats->dense = impl_->dense;
    stats->relative_residual = rel;
    stats->refinement_steps = steps;
  }
  if (!(rel <= kSolveTolerance))
    throw SingularSystemError("DirectSolver: relative residual " + std::to_string(rel) + " above tolerance", -1);
  return x;
}

Eigen::VectorXd factor_solve(const SparseMatrix& m, const Eigen::VectorXd& rhs, SolveStats* stats) {
  DirectSolver solver(m);
  return solver.solve(rhs, stats);
}

LanczosResult lanczos_largest(int n, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply, double tol,
                              int max_iterations) {
  LanczosResult res;
  if (n == 0) return res;
  const int kmax = std::min(n, max_iterations);
  Eigen::MatrixXd q(n, kmax + 1);
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.5 * dist(rng);
  q.col(0) = v.normalized();
  std::vector<double> alpha, beta;
  for (int k = 0; k < kmax; ++k) {
    Eigen::VectorXd w = apply(q.col(k));
    const double a = q.col(k).dot(w);
    alpha.push_back(a);
    w -= a * q.col(k);
    if (k > 0) w -= beta[k - 1] * q.col(k - 1);
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(k + 1) * (q.leftCols(k + 1).transpose() * w);
    const double b = w.norm();

    const int m = k + 1;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) t(i, i) = alpha[i];
    for (int i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = beta[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const double theta = es.eigenvalues()[m - 1];
    const double ritz_res = std::abs(b * es.eigenvectors()(m - 1, m - 1));
    res.lambda = theta;
    res.relative_residual = theta != 0.0 ? ritz_res / std::abs(theta) : ritz_res;
    res.iterations = m;
    if (res.relative_residual <= tol || b <= 1e-14 * std::abs(theta) || m == n) {
      res.converged = true;
      return res;
    }
    beta.push_back(b);
    q.col(k + 1) = w / b;
  }
  return res;
}

CondEstimate estimate_condition(const SparseMatrix& m, double tol, int max_iterations) {
  if (m.rows() != m.cols()) throw std::invalid_argument("estimate_condition: matrix is not square");
  using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;
  const ColMatrix a(m.storage());
  Eigen::SimplicialLLT<ColMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> llt(a);
  if (llt.info() != Eigen::Success) throw NotPositiveDefiniteError("estimate_condition: Cholesky factorization failed");

  const int n = m.rows();
  const LanczosResult top = lanczos_largest(n, [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(m * x); }, tol,
                                            max_iterations);
  const LanczosResult inv = lanczos_largest(n, [&](const Eigen::VectorXd& x) { return Eigen::VectorXd(llt.solve(x)); },
                                            tol, max_iterations);
  CondEstimate c;
  c.lambda_max = top.lambda;
  c.lambda_min = 1.0 / inv.lambda;
  c.iterations = top.iterations + inv.iterations;
  c.residual_max = top.relative_residual;
  c.residual_min = inv.relative_residual;
  if (!(inv.lambda > 0.0)) throw NotPositiveDefiniteError("estimate_condition: nonpositive inverse eigenvalue");
  if (!top.converged || !inv.converged) throw ConvergenceError("estimate_condition: Lanczos did not converge", c);
  return c;
}

}  // namespace divstokes
