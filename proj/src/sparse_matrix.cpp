#include "accurt/sparse_matrix.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

namespace accurt {

namespace {

std::atomic<unsigned> g_spmv_threads{1};

// Below this many rows a parallel product is not worth the thread start-up.
constexpr Index kParallelRowThreshold = 20000;

void multiply_rows(const SparseMatrix::Storage& a, const double* x, double* y, Index begin,
                   Index end) {
  const int* offsets = a.outerIndexPtr();
  const int* cols = a.innerIndexPtr();
  const double* vals = a.valuePtr();
  for (Index i = begin; i < end; ++i) {
    double sum = 0.0;
    for (int p = offsets[i]; p < offsets[i + 1]; ++p) sum += vals[p] * x[cols[p]];
    y[i] = sum;
  }
}

}  // namespace

SparseMatrix::SparseMatrix(Storage storage) : storage_(std::move(storage)) {
  if (storage_.rows() != storage_.cols()) {
    throw DimensionError("SparseMatrix: matrix must be square, got " +
                         std::to_string(storage_.rows()) + "x" + std::to_string(storage_.cols()));
  }
  storage_.makeCompressed();
  validate();
}

SparseMatrix SparseMatrix::from_triplets(Index n, const std::vector<Triplet>& entries) {
  Storage s(n, n);
  for (const auto& t : entries) {
    if (t.row() < 0 || t.row() >= n || t.col() < 0 || t.col() >= n) {
      throw InvalidArgument("SparseMatrix: entry (" + std::to_string(t.row()) + ", " +
                            std::to_string(t.col()) + ") outside a " + std::to_string(n) +
                            "x" + std::to_string(n) + " matrix");
    }
  }
  s.setFromTriplets(entries.begin(), entries.end());
  return SparseMatrix(std::move(s));
}

SparseMatrix SparseMatrix::from_csr(Index n, std::vector<int> row_offsets,
                                    std::vector<int> col_indices, std::vector<double> values) {
  if (static_cast<Index>(row_offsets.size()) != n + 1 || row_offsets.front() != 0 ||
      static_cast<std::size_t>(row_offsets.back()) != col_indices.size() ||
      col_indices.size() != values.size()) {
    throw InvalidArgument("SparseMatrix: inconsistent CSR array lengths");
  }
  for (Index i = 0; i < n; ++i) {
    if (row_offsets[i + 1] < row_offsets[i]) {
      throw InvalidArgument("SparseMatrix: row offsets decrease at row " + std::to_string(i));
    }
  }
  const auto nnz = static_cast<Index>(values.size());
  Storage s(n, n);
  s.resizeNonZeros(nnz);
  std::copy(row_offsets.begin(), row_offsets.end(), s.outerIndexPtr());
  std::copy(col_indices.begin(), col_indices.end(), s.innerIndexPtr());
  std::copy(values.begin(), values.end(), s.valuePtr());
  SparseMatrix m;
  m.storage_ = std::move(s);
  m.validate();
  return m;
}

SparseMatrix SparseMatrix::identity(Index n) {
  Storage s(n, n);
  s.setIdentity();
  return SparseMatrix(std::move(s));
}

SparseMatrix SparseMatrix::zero(Index n) { return SparseMatrix(Storage(n, n)); }

SparseMatrix SparseMatrix::from_dense(const Matrix& dense, double drop_below) {
  if (dense.rows() != dense.cols()) throw DimensionError("SparseMatrix: dense input not square");
  return SparseMatrix(Storage(dense.sparseView(1.0, drop_below)));
}

void SparseMatrix::validate() const {
  const Index n = storage_.rows();
  const int* offsets = storage_.outerIndexPtr();
  const int* cols = storage_.innerIndexPtr();
  const double* vals = storage_.valuePtr();
  for (Index i = 0; i < n; ++i) {
    if (offsets[i + 1] < offsets[i]) {
      throw InvalidArgument("SparseMatrix: row offsets decrease at row " + std::to_string(i));
    }
    for (int p = offsets[i]; p < offsets[i + 1]; ++p) {
      if (cols[p] < 0 || cols[p] >= n) {
        throw InvalidArgument("SparseMatrix: column index out of range in row " +
                              std::to_string(i));
      }
      if (p > offsets[i] && cols[p] <= cols[p - 1]) {
        throw InvalidArgument("SparseMatrix: column indices not strictly increasing in row " +
                              std::to_string(i));
      }
      if (!std::isfinite(vals[p])) {
        throw InvalidArgument("SparseMatrix: non-finite value in row " + std::to_string(i));
      }
    }
  }
}

std::span<const int> SparseMatrix::row_offsets() const {
  return {storage_.outerIndexPtr(), static_cast<std::size_t>(storage_.rows() + 1)};
}

std::span<const int> SparseMatrix::col_indices() const {
  return {storage_.innerIndexPtr(), static_cast<std::size_t>(storage_.nonZeros())};
}

std::span<const double> SparseMatrix::values() const {
  return {storage_.valuePtr(), static_cast<std::size_t>(storage_.nonZeros())};
}

double SparseMatrix::norm1() const {
  Vector col_sums = Vector::Zero(size());
  for (Index i = 0; i < size(); ++i) {
    for (Storage::InnerIterator it(storage_, i); it; ++it) col_sums(it.col()) += std::abs(it.value());
  }
  return size() == 0 ? 0.0 : col_sums.maxCoeff();
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : values()) m = std::max(m, std::abs(v));
  return m;
}

Matrix SparseMatrix::to_dense() const { return Matrix(storage_); }

SparseMatrix SparseMatrix::transpose() const { return SparseMatrix(Storage(storage_.transpose())); }

bool operator==(const SparseMatrix& a, const SparseMatrix& b) {
  return a.size() == b.size() && std::ranges::equal(a.row_offsets(), b.row_offsets()) &&
         std::ranges::equal(a.col_indices(), b.col_indices()) &&
         std::ranges::equal(a.values(), b.values());
}

void set_spmv_threads(unsigned threads) { g_spmv_threads = std::max(1u, threads); }

unsigned spmv_threads() { return g_spmv_threads; }

Vector spmv(const SparseMatrix& a, const Eigen::Ref<const Vector>& x) {
  if (x.size() != a.size()) {
    throw DimensionError("spmv: matrix of size " + std::to_string(a.size()) +
                         " applied to vector of length " + std::to_string(x.size()));
  }
  Vector y(a.size());
  const Index n = a.size();
  const unsigned threads = g_spmv_threads;
  if (threads <= 1 || n < kParallelRowThreshold) {
    multiply_rows(a.eigen(), x.data(), y.data(), 0, n);
    return y;
  }
  std::vector<std::jthread> workers;
  const Index chunk = (n + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const Index begin = w * chunk;
    const Index end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&, begin, end] { multiply_rows(a.eigen(), x.data(), y.data(), begin, end); });
  }
  workers.clear();
  return y;
}

SparseMatrix shifted(const SparseMatrix& a, double gamma) {
  if (!(gamma >= 0)) throw InvalidArgument("shifted: gamma must be nonnegative");
  const Index n = a.size();
  std::vector<int> offsets(n + 1, 0);
  std::vector<int> cols;
  std::vector<double> vals;
  cols.reserve(a.nonzeros() + n);
  vals.reserve(a.nonzeros() + n);
  const auto src_off = a.row_offsets();
  const auto src_col = a.col_indices();
  const auto src_val = a.values();
  for (Index i = 0; i < n; ++i) {
    bool diagonal_done = false;
    for (int p = src_off[i]; p < src_off[i + 1]; ++p) {
      const int j = src_col[p];
      if (!diagonal_done && j >= i) {
        if (j == i) {
          cols.push_back(j);
          vals.push_back(1.0 + gamma * src_val[p]);
          diagonal_done = true;
          continue;
        }
        cols.push_back(static_cast<int>(i));
        vals.push_back(1.0);
        diagonal_done = true;
      }
      if (gamma == 0.0) continue;
      cols.push_back(j);
      vals.push_back(gamma * src_val[p]);
    }
    if (!diagonal_done) {
      cols.push_back(static_cast<int>(i));
      vals.push_back(1.0);
    }
    offsets[i + 1] = static_cast<int>(cols.size());
  }
  return SparseMatrix::from_csr(n, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix symmetric_part(const SparseMatrix& a) {
  SparseMatrix::Storage s = 0.5 * (a.eigen() + SparseMatrix::Storage(a.eigen().transpose()));
  return SparseMatrix(std::move(s));
}

SparseMatrix skew_part(const SparseMatrix& a) {
  SparseMatrix::Storage s = 0.5 * (a.eigen() - SparseMatrix::Storage(a.eigen().transpose()));
  return SparseMatrix(std::move(s));
}

}  // namespace accurt
