#pragma once

#include "divdpg/types.hpp"

#include <Eigen/Sparse>

#include <iosfwd>
#include <vector>

namespace divdpg {

/// Cholesky factor of a dense SPD matrix.
class DenseCholesky {
 public:
  /// Throws Error on a non-positive pivot.
  explicit DenseCholesky(const Matrix& a);

  int size() const { return static_cast<int>(llt_.rows()); }
  Vector solve(const Vector& b) const { return llt_.solve(b); }
  Matrix solve(const Matrix& b) const { return llt_.solve(b); }
  /// L^{-1} b with A = L L^T.
  Matrix solve_lower(const Matrix& b) const { return llt_.matrixL().solve(b); }

 private:
  Eigen::LLT<Matrix> llt_;
};

/// Extended precision for global normal equations. Their condition number
/// grows like h^-4 for the fourth-order problem, which exhausts double
/// precision on graded meshes even though the local factors are accurate.
using Real = long double;
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Triplet = Eigen::Triplet<Real>;

/// Symmetric sparse matrix stored as its upper triangle (compressed columns).
class SparseSymmetric {
 public:
  SparseSymmetric() = default;
  /// Entries below the diagonal are dropped; duplicates are summed in input order.
  SparseSymmetric(int n, const std::vector<Triplet>& triplets);

  int size() const { return static_cast<int>(upper_.rows()); }
  long nonzeros() const { return upper_.nonZeros(); }
  const Eigen::SparseMatrix<Real>& upper() const { return upper_; }
  RealVector multiply(const RealVector& x) const;
  Vector multiply(const Vector& x) const;
  Vector diagonal() const { return upper_.diagonal().cast<double>(); }
  Matrix to_dense() const;

 private:
  Eigen::SparseMatrix<Real> upper_;
};

enum class SolverKind { Direct, ConjugateGradient };

struct SolveReport {
  Vector x;
  double relative_residual = 0.0;  // |D^{-1/2}(Ax - f)| / |D^{-1/2} f|, D = diag(A)
  double unscaled_residual = 0.0;  // |Ax - f| / |f|
  int iterations = 0;       // CG only
  long factor_nonzeros = 0;  // direct only
};

/// Factorization (direct) or preconditioner setup (CG) of an SPD matrix,
/// reusable for several right-hand sides.
class SparseSpdSolver {
 public:
  SparseSpdSolver(const SparseSymmetric& a, SolverKind kind = SolverKind::Direct, double cg_tolerance = 1e-13);
  ~SparseSpdSolver();
  SparseSpdSolver(const SparseSpdSolver&) = delete;
  SparseSpdSolver& operator=(const SparseSpdSolver&) = delete;

  /// Throws on CG non-convergence.
  RealVector solve(const RealVector& f);
  long factor_nonzeros() const { return factor_nonzeros_; }
  int iterations() const { return iterations_; }

 private:
  struct Impl;
  Impl* impl_;
  long factor_nonzeros_ = 0;
  int iterations_ = 0;
};

/// Relative residual |D^{-1/2} r| / |D^{-1/2} f| with D = diag(A).
double equilibrated_residual(const SparseSymmetric& a, const RealVector& r, const RealVector& f);

/// Solves A x = f for SPD A: sparse Cholesky with approximate minimum degree
/// ordering, or Jacobi-preconditioned conjugate gradients, both in extended
/// precision. Throws on breakdown.
SolveReport sparse_spd_solve(const SparseSymmetric& a, const RealVector& f, SolverKind kind = SolverKind::Direct,
                             double cg_tolerance = 1e-13);
inline SolveReport sparse_spd_solve(const SparseSymmetric& a, const Vector& f, SolverKind kind = SolverKind::Direct,
                                    double cg_tolerance = 1e-13) {
  return sparse_spd_solve(a, RealVector(f.cast<Real>()), kind, cg_tolerance);
}

/// Matrix Market coordinate format, symmetric, upper triangle.
void write_matrix_market(const SparseSymmetric& a, std::ostream& out);

}  // namespace divdpg
