#pragma once

#include <Eigen/SparseCore>

#include <span>
#include <vector>

#include "accurt/dense.hpp"

namespace accurt {

using Triplet = Eigen::Triplet<double, int>;

/// Square real matrix in compressed sparse row form. Immutable once built:
/// row offsets are nondecreasing, column indices lie in [0, n) and increase
/// strictly within each row, and every stored value is finite.
class SparseMatrix {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

  SparseMatrix() = default;

  /// Takes ownership of an Eigen matrix; compresses it and checks invariants.
  explicit SparseMatrix(Storage storage);

  /// Duplicate (row, col) pairs are summed.
  static SparseMatrix from_triplets(Index n, const std::vector<Triplet>& entries);
  static SparseMatrix from_csr(Index n, std::vector<int> row_offsets,
                               std::vector<int> col_indices, std::vector<double> values);
  static SparseMatrix identity(Index n);
  static SparseMatrix zero(Index n);
  static SparseMatrix from_dense(const Matrix& dense, double drop_below = 0.0);

  Index size() const { return storage_.rows(); }
  Index nonzeros() const { return storage_.nonZeros(); }

  std::span<const int> row_offsets() const;
  std::span<const int> col_indices() const;
  std::span<const double> values() const;

  const Storage& eigen() const { return storage_; }

  /// Max absolute column sum.
  double norm1() const;
  /// Largest absolute stored value.
  double max_abs() const;
  Matrix to_dense() const;
  SparseMatrix transpose() const;

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b);

 private:
  void validate() const;

  Storage storage_;
};

/// y = A x. Rows are split over worker threads when parallel products are
/// enabled; every row is still summed in storage order, so the result does
/// not depend on the thread count.
Vector spmv(const SparseMatrix& a, const Eigen::Ref<const Vector>& x);

/// Number of threads spmv() may use; 1 means strictly sequential.
void set_spmv_threads(unsigned threads);
unsigned spmv_threads();

/// I + gamma A, always storing the diagonal.
SparseMatrix shifted(const SparseMatrix& a, double gamma);

/// Symmetric part (A + A^T) / 2 and skew part (A - A^T) / 2.
SparseMatrix symmetric_part(const SparseMatrix& a);
SparseMatrix skew_part(const SparseMatrix& a);

}  // namespace accurt
