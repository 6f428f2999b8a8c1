#pragma once

#include <Eigen/SparseCore>

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "accurt/sparse_matrix.hpp"

namespace accurt {

enum class FactorizationKind { exact_lu, ilut };

/// How the ILUT threshold is scaled: by the 2-norm of the current row of the
/// input matrix, or used as is.
enum class DropRule { row_norm_relative, absolute };

/// Reusable solve handle for a square sparse matrix M, either an exact LU
/// factorization P M Q = L U or an incomplete one with threshold dropping
/// (no permutations). Immutable after construction.
class Factorization {
 public:
  FactorizationKind kind() const { return kind_; }
  Index size() const { return n_; }

  /// The shift gamma when M = I + gamma A was built by the *_shifted factories,
  /// NaN otherwise.
  double shift_gamma() const { return shift_gamma_; }
  double drop_tolerance() const { return drop_tol_; }
  /// ILUT pivots that were zero and got replaced.
  Index pivot_repairs() const { return pivot_repairs_; }

  /// P as a map from original row to pivot position, Q as the original column
  /// eliminated at each position. Both identity for ILUT.
  std::span<const int> row_permutation() const { return row_perm_; }
  std::span<const int> column_permutation() const { return col_perm_; }

  /// Unit lower and upper triangular factors in pivot order.
  Eigen::SparseMatrix<double> lower() const;
  Eigen::SparseMatrix<double> upper() const;
  Index factor_nonzeros() const { return static_cast<Index>(l_val_.size() + u_val_.size()); }

  /// M^{-1} b for exact LU, the preconditioner action for ILUT.
  Vector solve(const Eigen::Ref<const Vector>& b) const;

 private:
  friend Factorization lu_factorize(const SparseMatrix& m);
  friend Factorization ilut_factorize(const SparseMatrix& m, double drop_eps, DropRule rule);
  friend Factorization lu_factorize_shifted(const SparseMatrix& a, double gamma);
  friend Factorization ilut_factorize_shifted(const SparseMatrix& a, double gamma,
                                              double drop_eps, DropRule rule);

  FactorizationKind kind_ = FactorizationKind::exact_lu;
  Index n_ = 0;
  double shift_gamma_ = std::numeric_limits<double>::quiet_NaN();
  double drop_tol_ = 0.0;
  Index pivot_repairs_ = 0;
  // Compressed columns. The diagonal is the first entry of each L column and
  // the last entry of each U column.
  std::vector<int> l_ptr_, l_idx_;
  std::vector<double> l_val_;
  std::vector<int> u_ptr_, u_idx_;
  std::vector<double> u_val_;
  std::vector<int> row_perm_;
  std::vector<int> col_perm_;
};

/// Relative pivot size below which elimination reports singularity.
inline constexpr double kSingularPivotThreshold = 1e-14;
/// Threshold partial pivoting keeps the diagonal candidate if it is at least
/// this fraction of the largest candidate in its column.
inline constexpr double kDiagonalPivotPreference = 0.1;

/// Exact sparse LU with approximate-minimum-degree column ordering and
/// threshold partial pivoting. Throws SingularMatrixError when no pivot
/// exceeds 1e-14 * max|M_ij| in some column.
Factorization lu_factorize(const SparseMatrix& m);
/// lu_factorize(shifted(a, gamma)) that remembers gamma.
Factorization lu_factorize_shifted(const SparseMatrix& a, double gamma);

/// Row-wise incomplete LU, dropping entries below drop_eps times the row
/// 2-norm (or below drop_eps outright for DropRule::absolute). Zero pivots are
/// replaced by a sign-preserving drop_eps * row norm and counted.
Factorization ilut_factorize(const SparseMatrix& m, double drop_eps,
                             DropRule rule = DropRule::row_norm_relative);
Factorization ilut_factorize_shifted(const SparseMatrix& a, double gamma, double drop_eps,
                                     DropRule rule = DropRule::row_norm_relative);

/// Exact LU factorizations performed by this process so far.
std::size_t lu_factorization_count();

}  // namespace accurt
