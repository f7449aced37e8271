#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <Eigen/UmfPackSupport>
#include <atomic>
#include <iostream>

#include "biphasic/errors.hpp"
#include "biphasic/solver.hpp"

namespace biphasic {

namespace {

// Accepted relative residual of a direct solve.
constexpr double kSolveTolerance = 1e-8;

bool accurate(const SparseMatrix& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  return x.allFinite() && (a * x - b).norm() <= kSolveTolerance * b.norm();
}

std::atomic<bool> g_warned{false};

}  // namespace

// UMFPACK is the primary factorization. Every solution is checked against
// the matrix; a failed check (for instance a BLAS build that miscomputes on
// the host CPU) switches this solver to Eigen's own LDL^T, with a pivoting LU
// behind it. The constrained block system is symmetric quasi-definite while
// the solid tangent stays positive definite, so LDL^T exists for any ordering.
struct LinearSolver::Impl {
  Eigen::UmfPackLU<SparseMatrix> umf;
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  bool use_umfpack = true;
  Eigen::Index rows = -1;
  Eigen::Index nnz = -1;
  bool umf_analyzed = false;
  bool ldlt_analyzed = false;
  bool lu_analyzed = false;

  bool try_umfpack(const SparseMatrix& a, const Eigen::VectorXd& b, Eigen::VectorXd& x) {
    if (!umf_analyzed) {
      umf.analyzePattern(a);
      umf_analyzed = true;
    }
    umf.factorize(a);
    if (umf.info() != Eigen::Success) return false;
    x = umf.solve(b);
    return umf.info() == Eigen::Success && accurate(a, x, b);
  }

  bool try_ldlt(const SparseMatrix& a, const Eigen::VectorXd& b, Eigen::VectorXd& x) {
    if (!ldlt_analyzed) {
      ldlt.analyzePattern(a);
      ldlt_analyzed = true;
    }
    ldlt.factorize(a);
    if (ldlt.info() != Eigen::Success) return false;
    x = ldlt.solve(b);
    return accurate(a, x, b);
  }

  bool try_lu(const SparseMatrix& a, const Eigen::VectorXd& b, Eigen::VectorXd& x) {
    if (!lu_analyzed) {
      lu.analyzePattern(a);
      lu_analyzed = true;
    }
    lu.factorize(a);
    if (lu.info() != Eigen::Success) return false;
    x = lu.solve(b);
    return lu.info() == Eigen::Success && x.allFinite();
  }
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

Eigen::VectorXd LinearSolver::solve(const SparseMatrix& matrix, const Eigen::VectorXd& rhs) {
  auto& s = *impl_;
  if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.size())
    throw ConfigError("linear system dimensions do not match");
  if (rhs.norm() == 0.0) return Eigen::VectorXd::Zero(rhs.size());
  if (matrix.rows() != s.rows || matrix.nonZeros() != s.nnz) {
    s.rows = matrix.rows();
    s.nnz = matrix.nonZeros();
    s.umf_analyzed = s.ldlt_analyzed = s.lu_analyzed = false;
  }

  Eigen::VectorXd x;
  if (s.use_umfpack) {
    if (s.try_umfpack(matrix, rhs, x)) return x;
    s.use_umfpack = false;
    if (!g_warned.exchange(true))
      std::cerr << "biphasic: UMFPACK solution failed the residual check; using the built-in sparse LDL^T\n";
  }
  if (s.try_ldlt(matrix, rhs, x)) return x;
  if (s.try_lu(matrix, rhs, x)) return x;
  s.rows = -1;
  throw NonConvergenceError("sparse factorization failed (singular or ill-posed system)", {});
}

}  // namespace biphasic
