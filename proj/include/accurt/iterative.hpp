#pragma once

#include <functional>

#include "accurt/factorization.hpp"
#include "accurt/sparse_matrix.hpp"

namespace accurt {

/// A square linear map given by its action. Operators built from a matrix
/// keep a reference to it; the matrix must outlive the operator.
struct LinearOperator {
  Index n = 0;
  std::function<Vector(const Vector&)> apply;

  static LinearOperator from_matrix(const SparseMatrix& a);
  /// x -> (I + gamma A) x without assembling the shifted matrix.
  static LinearOperator shifted(const SparseMatrix& a, double gamma);
};

struct SolveStats {
  Index iterations = 0;
  /// The quantity the stopping test uses: the preconditioned residual for
  /// preconditioned GMRES, the plain residual otherwise. Relative to the
  /// matching norm of the right-hand side.
  double final_relative_residual = 0.0;
  /// ||b - A x|| / ||b||, recomputed from the returned iterate.
  double true_relative_residual = 0.0;
  bool converged = false;
};

struct SolveResult {
  Vector x;
  SolveStats stats;
};

/// Thrown when an iterative solver runs out of iterations; carries the best
/// iterate found.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, SolveResult best)
      : Error(what), best_(std::move(best)) {}
  const SolveResult& best() const { return best_; }

 private:
  SolveResult best_;
};

struct GmresOptions {
  Index restart = 10;
  double tol = 1e-10;
  Index max_outer = 100;
};

/// Restarted GMRES(m) with modified Gram-Schmidt. With a preconditioner M the
/// system is solved in the left-preconditioned form M^{-1} A x = M^{-1} b and
/// the stopping test is ||M^{-1}(b - A x)|| <= tol ||M^{-1} b||.
SolveResult gmres_restarted(const LinearOperator& op, const Vector& b, const Vector& x0,
                            const GmresOptions& options, const Factorization* precond = nullptr);

/// Preconditioned Richardson iteration x <- x + M^{-1}(b - (I + gamma_tilde A) x)
/// with M = I + gamma A the factorized shift. Requires
/// 0 < gamma_tilde <= precond.shift_gamma(). Stops on the plain relative
/// residual of the shifted system.
SolveResult richardson(const SparseMatrix& a, double gamma_tilde, const Factorization& precond,
                       const Vector& b, double tol, Index max_iter);

/// Whether preconditioning (I + gamma_tilde A) by (I + gamma A) makes
/// Richardson iteration provably faster than the unpreconditioned one:
/// 1 / (1 + gamma rho(A)) < gamma_tilde / gamma.
bool prefer_preconditioner(double gamma_tilde, double gamma, double rho_a);

/// Power-iteration estimate of the spectral radius, ||A x_k|| for the
/// normalized k-th iterate. Tends to approach rho(A) from below; it does not
/// converge when the dominant eigenvalues form a complex pair of distinct
/// phases with nonnormal coupling.
double spectral_radius_estimate(const SparseMatrix& a, Index iters = 50);

}  // namespace accurt
