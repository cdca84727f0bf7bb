#ifndef DIVSTOKES_SPARSELA_HPP
#define DIVSTOKES_SPARSELA_HPP

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace divstokes {

using Triplet = Eigen::Triplet<double>;

/// Compressed-row matrix with a symmetry flag. Duplicate triplets are summed.
class SparseMatrix {
public:
  using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, const std::vector<Triplet>& entries, bool symmetric);
  SparseMatrix(Storage m, bool symmetric);

  int rows() const { return static_cast<int>(m_.rows()); }
  int cols() const { return static_cast<int>(m_.cols()); }
  long nonzeros() const { return m_.nonZeros(); }
  bool symmetric() const { return symmetric_; }
  const Storage& storage() const { return m_; }

  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const { return m_ * x; }
  /// max |a_ij - a_ji|.
  double symmetry_defect() const;
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(m_); }

private:
  Storage m_;
  bool symmetric_ = false;
};

class SingularSystemError : public std::runtime_error {
public:
  SingularSystemError(const std::string& what, int row) : std::runtime_error(what), row_(row) {}
  int row() const { return row_; }

private:
  int row_;
};

struct SolveStats {
  int dimension = 0;
  bool dense = false;
  double relative_residual = 0.0;
  int refinement_steps = 0;
};

inline constexpr int kDenseSolveThreshold = 2000;
inline constexpr double kSolveTolerance = 1e-10;

/// LU factorization of a square (possibly indefinite) matrix after symmetric
/// max-row equilibration: sparse LU with COLAMD ordering, or dense partial
/// pivoting LU below kDenseSolveThreshold. Solves refine iteratively and throw
/// if the relative residual stays above kSolveTolerance.
class DirectSolver {
public:
  explicit DirectSolver(const SparseMatrix& m);
  ~DirectSolver();
  DirectSolver(const DirectSolver&) = delete;
  DirectSolver& operator=(const DirectSolver&) = delete;

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs, SolveStats* stats = nullptr) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Eigen::VectorXd factor_solve(const SparseMatrix& m, const Eigen::VectorXd& rhs, SolveStats* stats = nullptr);

struct CondEstimate {
  double lambda_max = 0.0;
  double lambda_min = 0.0;
  int iterations = 0;
  double residual_max = 0.0;  ///< relative Ritz residual of lambda_max
  double residual_min = 0.0;  ///< relative Ritz residual of 1 / lambda_min

  double cond() const { return lambda_max / lambda_min; }
};

class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, CondEstimate best) : std::runtime_error(what), best_(best) {}
  const CondEstimate& best() const { return best_; }

private:
  CondEstimate best_;
};

class NotPositiveDefiniteError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Extremal eigenvalues of an SPD matrix: Lanczos with full
/// reorthogonalization on m for lambda_max and on m^{-1} (sparse Cholesky,
/// AMD ordering) for lambda_min. Throws NotPositiveDefiniteError if the
/// Cholesky factorization fails.
CondEstimate estimate_condition(const SparseMatrix& m, double tol = 1e-6, int max_iterations = 400);

/// Largest eigenvalue of the operator apply() on R^n by Lanczos.
struct LanczosResult {
  double lambda = 0.0;
  double relative_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

LanczosResult lanczos_largest(int n, const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& apply, double tol,
                              int max_iterations);

}  // namespace divstokes

#endif
