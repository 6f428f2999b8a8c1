#pragma once

// Reference values of exp(-tA)v for measuring the error of restarted runs.

#include "accurt/sparse_matrix.hpp"

namespace accurt {

enum class ReferenceMethod { automatic, dense_expm, polynomial_krylov };

struct Reference {
  ReferenceMethod method = ReferenceMethod::dense_expm;
  Vector solution;
  /// Estimated 2-norm error of `solution`. For the dense path: the
  /// discrepancy between exp(-tA)v and exp(-tA/2)(exp(-tA/2)v). For the
  /// Krylov path: t times the largest residual norm seen on 20 sample points.
  double accuracy = 0.0;
  /// Krylov dimension used; 0 for the dense path.
  Index krylov_steps = 0;
};

/// Largest dimension the automatic choice sends to the dense path.
inline constexpr Index kDenseReferenceLimit = 2000;

struct KrylovReferenceOptions {
  /// Target for max_s ||r_k(s)|| relative to ||v||.
  double residual_tol = 1e-12;
  Index max_steps = 2000;
  /// Residual checks happen every `check_every` steps.
  Index check_every = 10;
};

/// exp(-tA)v by dense scaling-and-squaring when n <= 2000 (or when forced),
/// otherwise by one unrestarted polynomial Arnoldi run stopped on the
/// residual. Throws Error when the Krylov run does not reach the tolerance.
Reference reference_solution(const SparseMatrix& a, const Vector& v, double t,
                             ReferenceMethod method = ReferenceMethod::automatic,
                             const KrylovReferenceOptions& options = {});

/// ||y - ref.solution||.
double true_error(const Vector& y, const Reference& ref);

const char* to_string(ReferenceMethod method);

}  // namespace accurt
