#include "divdpg/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>

#include <iomanip>
#include <ostream>

namespace divdpg {

DenseCholesky::DenseCholesky(const Matrix& a) : llt_(a) {
  if (a.rows() != a.cols()) throw Error("DenseCholesky: matrix not square");
  if (llt_.info() != Eigen::Success) throw Error("DenseCholesky: matrix is not positive definite");
}

SparseSymmetric::SparseSymmetric(int n, const std::vector<Triplet>& triplets) : upper_(n, n) {
  std::vector<Triplet> upper;
  upper.reserve(triplets.size());
  for (const auto& t : triplets)
    if (t.row() <= t.col()) upper.push_back(t);
  upper_.setFromTriplets(upper.begin(), upper.end());
  upper_.makeCompressed();
}

RealVector SparseSymmetric::multiply(const RealVector& x) const { return upper_.selfadjointView<Eigen::Upper>() * x; }

Vector SparseSymmetric::multiply(const Vector& x) const {
  return multiply(RealVector(x.cast<Real>())).cast<double>();
}

Matrix SparseSymmetric::to_dense() const {
  const RealMatrix d = RealMatrix(upper_).selfadjointView<Eigen::Upper>();
  return d.cast<double>();
}

struct SparseSpdSolver::Impl {
  SolverKind kind;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<Real>, Eigen::Upper, Eigen::AMDOrdering<int>> llt;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<Real>, Eigen::Upper, Eigen::DiagonalPreconditioner<Real>> cg;
};

SparseSpdSolver::SparseSpdSolver(const SparseSymmetric& a, SolverKind kind, double cg_tolerance)
    : impl_(new Impl{kind, {}, {}}) {
  if (kind == SolverKind::Direct) {
    impl_->llt.compute(a.upper());
    if (impl_->llt.info() != Eigen::Success) {
      delete impl_;
      throw Error("sparse_spd_solve: Cholesky breakdown (n = " + std::to_string(a.size()) +
                  ", nnz = " + std::to_string(a.nonzeros()) + ")");
    }
    factor_nonzeros_ = impl_->llt.matrixL().nestedExpression().nonZeros();
  } else {
    impl_->cg.setTolerance(static_cast<Real>(cg_tolerance));
    impl_->cg.setMaxIterations(20 * a.size() + 100);
    impl_->cg.compute(a.upper());
  }
}

SparseSpdSolver::~SparseSpdSolver() { delete impl_; }

RealVector SparseSpdSolver::solve(const RealVector& f) {
  if (impl_->kind == SolverKind::Direct) return impl_->llt.solve(f);
  RealVector x = impl_->cg.solve(f);
  iterations_ += static_cast<int>(impl_->cg.iterations());
  if (impl_->cg.info() != Eigen::Success)
    throw Error("sparse_spd_solve: CG did not converge after " + std::to_string(impl_->cg.iterations()) +
                " iterations (estimated error " + std::to_string(static_cast<double>(impl_->cg.error())) + ")");
  return x;
}

double equilibrated_residual(const SparseSymmetric& a, const RealVector& r, const RealVector& f) {
  const RealVector d = a.upper().diagonal().cwiseAbs().cwiseSqrt().cwiseInverse();
  const Real fs = d.cwiseProduct(f).norm();
  return static_cast<double>(d.cwiseProduct(r).norm() / (fs > 0 ? fs : Real(1)));
}

SolveReport sparse_spd_solve(const SparseSymmetric& a, const RealVector& f, SolverKind kind, double cg_tolerance) {
  if (f.size() != a.size()) throw Error("sparse_spd_solve: dimension mismatch");
  SolveReport report;
  if (a.size() == 0) {
    report.x = Vector::Zero(0);
    return report;
  }
  SparseSpdSolver solver(a, kind, cg_tolerance);
  const RealVector x = solver.solve(f);
  report.x = x.cast<double>();
  report.iterations = solver.iterations();
  report.factor_nonzeros = solver.factor_nonzeros();
  // The raw relative residual bottoms out near eps |A| |x| / |f| on badly
  // scaled systems, so the equilibrated one is the reported measure.
  const RealVector r = a.multiply(x) - f;
  report.relative_residual = equilibrated_residual(a, r, f);
  const Real fn = f.norm();
  report.unscaled_residual = static_cast<double>(r.norm() / (fn > 0 ? fn : Real(1)));
  return report;
}

void write_matrix_market(const SparseSymmetric& a, std::ostream& out) {
  const auto& m = a.upper();
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  // Symmetric Matrix Market stores the lower triangle; transpose on the fly.
  out << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
  out << std::setprecision(17);
  for (int col = 0; col < m.outerSize(); ++col)
    for (Eigen::SparseMatrix<Real>::InnerIterator it(m, col); it; ++it)
      out << it.col() + 1 << ' ' << it.row() + 1 << ' ' << static_cast<double>(it.value()) << '\n';
}

}  // namespace divdpg
