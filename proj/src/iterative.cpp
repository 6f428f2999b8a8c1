#include "accurt/iterative.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace accurt {

LinearOperator LinearOperator::from_matrix(const SparseMatrix& a) {
  return {a.size(), [&a](const Vector& x) { return spmv(a, x); }};
}

LinearOperator LinearOperator::shifted(const SparseMatrix& a, double gamma) {
  return {a.size(), [&a, gamma](const Vector& x) -> Vector { return x + gamma * spmv(a, x); }};
}

SolveResult gmres_restarted(const LinearOperator& op, const Vector& b, const Vector& x0,
                            const GmresOptions& options, const Factorization* precond) {
  const Index n = op.n;
  if (b.size() != n || x0.size() != n) throw DimensionError("gmres_restarted: size mismatch");
  if (precond != nullptr && precond->size() != n) {
    throw DimensionError("gmres_restarted: preconditioner size mismatch");
  }
  if (!(options.tol > 0)) throw InvalidArgument("gmres_restarted: tol must be positive");
  if (options.restart < 1) throw InvalidArgument("gmres_restarted: restart must be >= 1");

  auto precondition = [&](const Vector& v) -> Vector {
    return precond != nullptr ? precond->solve(v) : v;
  };

  const double b_norm = b.norm();
  const Vector mb = precondition(b);
  const double mb_norm = mb.norm();

  SolveResult result{x0, {}};
  if (b_norm == 0.0) {
    result.x = Vector::Zero(n);
    result.stats.converged = true;
    return result;
  }

  const Index m = options.restart;
  std::vector<Vector> basis(m + 1);
  Matrix h = Matrix::Zero(m + 1, m);
  Vector cs(m), sn(m), g(m + 1);
  Vector& x = result.x;
  Index iterations = 0;

  auto finish = [&](const Vector& r_prec) {
    result.stats.iterations = iterations;
    result.stats.final_relative_residual = r_prec.norm() / mb_norm;
    result.stats.true_relative_residual = (b - op.apply(x)).norm() / b_norm;
    result.stats.converged = result.stats.final_relative_residual <= options.tol;
  };

  for (Index outer = 0;; ++outer) {
    const Vector r = precondition(b - op.apply(x));
    const double beta = r.norm();
    if (beta <= options.tol * mb_norm || outer == options.max_outer) {
      finish(r);
      break;
    }

    basis[0] = r / beta;
    h.setZero();
    g.setZero();
    g(0) = beta;
    Index used = 0;
    for (Index j = 0; j < m; ++j) {
      Vector w = precondition(op.apply(basis[j]));
      ++iterations;
      const double w_norm0 = w.norm();
      for (Index i = 0; i <= j; ++i) {
        h(i, j) = basis[i].dot(w);
        w -= h(i, j) * basis[i];
      }
      h(j + 1, j) = w.norm();

      for (Index i = 0; i < j; ++i) {
        const double t = cs(i) * h(i, j) + sn(i) * h(i + 1, j);
        h(i + 1, j) = -sn(i) * h(i, j) + cs(i) * h(i + 1, j);
        h(i, j) = t;
      }
      const double denom = std::hypot(h(j, j), h(j + 1, j));
      cs(j) = denom == 0.0 ? 1.0 : h(j, j) / denom;
      sn(j) = denom == 0.0 ? 0.0 : h(j + 1, j) / denom;
      const double next_norm = h(j + 1, j);
      h(j, j) = denom;
      h(j + 1, j) = 0.0;
      g(j + 1) = -sn(j) * g(j);
      g(j) = cs(j) * g(j);
      used = j + 1;

      const bool breakdown = next_norm <= 1e-14 * w_norm0;
      if (breakdown || std::abs(g(j + 1)) <= options.tol * mb_norm) break;
      basis[j + 1] = w / next_norm;
    }

    const Vector y = h.topLeftCorner(used, used)
                         .triangularView<Eigen::Upper>()
                         .solve(g.head(used));
    for (Index i = 0; i < used; ++i) x += y(i) * basis[i];
  }

  if (!result.stats.converged) {
    throw NonConvergenceError("gmres_restarted: no convergence after " +
                                  std::to_string(options.max_outer) + " cycles (relative residual " +
                                  std::to_string(result.stats.final_relative_residual) + ")",
                              result);
  }
  return result;
}

SolveResult richardson(const SparseMatrix& a, double gamma_tilde, const Factorization& precond,
                       const Vector& b, double tol, Index max_iter) {
  const double gamma = precond.shift_gamma();
  if (!(gamma_tilde > 0) || !(gamma_tilde <= gamma)) {
    throw InvalidArgument("richardson: need 0 < gamma_tilde <= preconditioner shift");
  }
  if (b.size() != a.size() || precond.size() != a.size()) {
    throw DimensionError("richardson: size mismatch");
  }
  const LinearOperator op = LinearOperator::shifted(a, gamma_tilde);
  const double b_norm = b.norm();
  SolveResult result{Vector::Zero(a.size()), {}};
  if (b_norm == 0.0) {
    result.stats.converged = true;
    return result;
  }
  Vector r = b;
  double rel = 1.0;
  Index it = 0;
  while (rel > tol && it < max_iter) {
    result.x += precond.solve(r);
    r = b - op.apply(result.x);
    rel = r.norm() / b_norm;
    ++it;
  }
  result.stats = {it, rel, rel, rel <= tol};
  if (!result.stats.converged) {
    throw NonConvergenceError("richardson: no convergence after " + std::to_string(max_iter) +
                                  " iterations",
                              result);
  }
  return result;
}

bool prefer_preconditioner(double gamma_tilde, double gamma, double rho_a) {
  return 1.0 / (1.0 + gamma * rho_a) < gamma_tilde / gamma;
}

double spectral_radius_estimate(const SparseMatrix& a, Index iters) {
  if (iters < 1) throw InvalidArgument("spectral_radius_estimate: iters must be >= 1");
  const Index n = a.size();
  if (n == 0) return 0.0;
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  Vector x(n);
  for (Index i = 0; i < n; ++i) x(i) = dist(rng);
  x.normalize();
  double estimate = 0.0;
  for (Index k = 0; k < iters; ++k) {
    Vector y = spmv(a, x);
    estimate = y.norm();
    if (estimate == 0.0) return 0.0;
    x = y / estimate;
  }
  return estimate;
}

}  // namespace accurt
