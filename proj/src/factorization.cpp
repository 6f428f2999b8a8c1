#include "accurt/factorization.hpp"

#include <Eigen/OrderingMethods>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <queue>
#include <string>

namespace accurt {

namespace {

std::atomic<std::size_t> g_lu_count{0};

using ColMajor = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// Columns reachable from the pattern of b in the graph of L (Gilbert-Peierls
// symbolic step). Returns the first used slot of `stack`; stack[top..n) holds
// the reach in topological order.
int reach(const std::vector<int>& l_ptr, const std::vector<int>& l_idx,
          const std::vector<int>& pinv, const ColMajor& b, int col, std::vector<int>& stack,
          std::vector<int>& pstack, std::vector<char>& marked) {
  const int n = static_cast<int>(pinv.size());
  int top = n;
  for (ColMajor::InnerIterator it(b, col); it; ++it) {
    const int start = static_cast<int>(it.index());
    if (marked[start]) continue;
    // Depth-first search from `start`, iterative to keep deep fill chains off
    // the call stack. `stack` doubles as the DFS stack from the bottom.
    int head = 0;
    std::vector<int>& dfs = pstack;  // pstack[n..2n) holds the node stack
    dfs[n + 0] = start;
    while (head >= 0) {
      const int j = dfs[n + head];
      const int jnew = pinv[j];
      if (!marked[j]) {
        marked[j] = 1;
        pstack[head] = jnew < 0 ? 0 : l_ptr[jnew];
      }
      bool done = true;
      const int p_end = jnew < 0 ? 0 : l_ptr[jnew + 1];
      for (int p = pstack[head]; p < p_end; ++p) {
        const int i = l_idx[p];
        if (marked[i]) continue;
        pstack[head] = p;
        dfs[n + ++head] = i;
        done = false;
        break;
      }
      if (done) {
        --head;
        stack[--top] = j;
      }
    }
  }
  for (int p = top; p < n; ++p) marked[stack[p]] = 0;
  return top;
}

double row_norm(const SparseMatrix& m, Index i) {
  const auto off = m.row_offsets();
  const auto val = m.values();
  double s = 0.0;
  for (int p = off[i]; p < off[i + 1]; ++p) s += val[p] * val[p];
  return std::sqrt(s);
}

}  // namespace

std::size_t lu_factorization_count() { return g_lu_count; }

Eigen::SparseMatrix<double> Factorization::lower() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(l_val_.size());
  for (Index j = 0; j < n_; ++j) {
    for (int p = l_ptr_[j]; p < l_ptr_[j + 1]; ++p) t.emplace_back(l_idx_[p], j, l_val_[p]);
  }
  Eigen::SparseMatrix<double> l(n_, n_);
  l.setFromTriplets(t.begin(), t.end());
  return l;
}

Eigen::SparseMatrix<double> Factorization::upper() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(u_val_.size());
  for (Index j = 0; j < n_; ++j) {
    for (int p = u_ptr_[j]; p < u_ptr_[j + 1]; ++p) t.emplace_back(u_idx_[p], j, u_val_[p]);
  }
  Eigen::SparseMatrix<double> u(n_, n_);
  u.setFromTriplets(t.begin(), t.end());
  return u;
}

Vector Factorization::solve(const Eigen::Ref<const Vector>& b) const {
  if (b.size() != n_) {
    throw DimensionError("Factorization::solve: factor of size " + std::to_string(n_) +
                         " applied to vector of length " + std::to_string(b.size()));
  }
  Vector x(n_);
  if (row_perm_.empty()) {
    x = b;
  } else {
    for (Index k = 0; k < n_; ++k) x(row_perm_[k]) = b(k);
  }
  for (Index j = 0; j < n_; ++j) {
    const int first = l_ptr_[j];
    x(j) /= l_val_[first];
    const double xj = x(j);
    if (xj == 0.0) continue;
    for (int p = first + 1; p < l_ptr_[j + 1]; ++p) x(l_idx_[p]) -= l_val_[p] * xj;
  }
  for (Index j = n_ - 1; j >= 0; --j) {
    const int last = u_ptr_[j + 1] - 1;
    x(j) /= u_val_[last];
    const double xj = x(j);
    if (xj == 0.0) continue;
    for (int p = u_ptr_[j]; p < last; ++p) x(u_idx_[p]) -= u_val_[p] * xj;
  }
  if (col_perm_.empty()) return x;
  Vector out(n_);
  for (Index k = 0; k < n_; ++k) out(col_perm_[k]) = x(k);
  return out;
}

Factorization lu_factorize(const SparseMatrix& m) {
  const int n = static_cast<int>(m.size());
  const ColMajor a(m.eigen());

  // Fill-reducing symmetric ordering on the pattern of A + A^T. Eigen's AMD
  // result lists the original index eliminated at each position, which is
  // what the loop below wants (SimplicialCholesky uses it the same way).
  std::vector<int> q(n);
  {
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm;
    Eigen::AMDOrdering<int> amd;
    amd(a, perm);
    for (int i = 0; i < n; ++i) q[i] = perm.indices()(i);
  }

  const double max_entry = m.max_abs();
  const double pivot_floor = kSingularPivotThreshold * max_entry;

  Factorization f;
  f.kind_ = FactorizationKind::exact_lu;
  f.n_ = n;
  f.l_ptr_.assign(n + 1, 0);
  f.u_ptr_.assign(n + 1, 0);
  f.l_idx_.reserve(4 * a.nonZeros() + n);
  f.l_val_.reserve(4 * a.nonZeros() + n);
  f.u_idx_.reserve(4 * a.nonZeros() + n);
  f.u_val_.reserve(4 * a.nonZeros() + n);

  std::vector<int> pinv(n, -1);
  std::vector<double> x(n, 0.0);
  std::vector<int> stack(n), pstack(2 * n);
  std::vector<char> marked(n, 0);

  for (int k = 0; k < n; ++k) {
    f.l_ptr_[k] = static_cast<int>(f.l_idx_.size());
    f.u_ptr_[k] = static_cast<int>(f.u_idx_.size());
    const int col = q[k];

    // x = L \ A(:, col) restricted to the reach of the column pattern.
    const int top = reach(f.l_ptr_, f.l_idx_, pinv, a, col, stack, pstack, marked);
    for (int p = top; p < n; ++p) x[stack[p]] = 0.0;
    for (ColMajor::InnerIterator it(a, col); it; ++it) x[it.index()] = it.value();
    for (int p = top; p < n; ++p) {
      const int j = stack[p];
      const int jnew = pinv[j];
      if (jnew < 0) continue;
      // Unit diagonal sits first in column jnew.
      const double xj = x[j];
      for (int q2 = f.l_ptr_[jnew] + 1; q2 < f.l_ptr_[jnew + 1]; ++q2) {
        x[f.l_idx_[q2]] -= f.l_val_[q2] * xj;
      }
    }

    int ipiv = -1;
    double best = -1.0;
    for (int p = top; p < n; ++p) {
      const int i = stack[p];
      if (pinv[i] < 0) {
        if (std::abs(x[i]) > best) {
          best = std::abs(x[i]);
          ipiv = i;
        }
      } else {
        f.u_idx_.push_back(pinv[i]);
        f.u_val_.push_back(x[i]);
      }
    }
    if (ipiv < 0 || best <= pivot_floor) {
      throw SingularMatrixError("lu_factorize: no usable pivot in column " +
                                std::to_string(col) + " (largest candidate " +
                                std::to_string(std::max(best, 0.0)) + ")");
    }
    if (pinv[col] < 0 && std::abs(x[col]) >= kDiagonalPivotPreference * best) ipiv = col;

    const double pivot = x[ipiv];
    f.u_idx_.push_back(k);
    f.u_val_.push_back(pivot);
    pinv[ipiv] = k;
    f.l_idx_.push_back(ipiv);
    f.l_val_.push_back(1.0);
    for (int p = top; p < n; ++p) {
      const int i = stack[p];
      if (pinv[i] < 0) {
        f.l_idx_.push_back(i);
        f.l_val_.push_back(x[i] / pivot);
      }
      x[i] = 0.0;
    }
  }
  f.l_ptr_[n] = static_cast<int>(f.l_idx_.size());
  f.u_ptr_[n] = static_cast<int>(f.u_idx_.size());
  for (int& i : f.l_idx_) i = pinv[i];

  f.row_perm_ = std::move(pinv);
  f.col_perm_ = std::move(q);
  ++g_lu_count;
  return f;
}

Factorization lu_factorize_shifted(const SparseMatrix& a, double gamma) {
  Factorization f = lu_factorize(shifted(a, gamma));
  f.shift_gamma_ = gamma;
  return f;
}

Factorization ilut_factorize(const SparseMatrix& m, double drop_eps, DropRule rule) {
  if (!(drop_eps >= 0)) throw InvalidArgument("ilut_factorize: drop tolerance must be >= 0");
  const int n = static_cast<int>(m.size());
  const auto off = m.row_offsets();
  const auto col = m.col_indices();
  const auto val = m.values();

  // Rows of L (strictly lower) and U (diagonal first) as they are produced.
  std::vector<int> l_off{0}, l_col;
  std::vector<double> l_v;
  std::vector<int> u_off{0}, u_col;
  std::vector<double> u_v;
  l_off.reserve(n + 1);
  u_off.reserve(n + 1);

  std::vector<double> w(n, 0.0);
  std::vector<char> in_pattern(n, 0);
  std::vector<int> upper_pattern;
  std::priority_queue<int, std::vector<int>, std::greater<>> lower_queue;
  Index repairs = 0;

  for (int i = 0; i < n; ++i) {
    const double norm_i = row_norm(m, i);
    const double tau = rule == DropRule::row_norm_relative ? drop_eps * norm_i : drop_eps;

    upper_pattern.clear();
    auto touch = [&](int j) {
      if (in_pattern[j]) return;
      in_pattern[j] = 1;
      if (j < i) {
        lower_queue.push(j);
      } else {
        upper_pattern.push_back(j);
      }
    };
    touch(i);
    for (int p = off[i]; p < off[i + 1]; ++p) {
      touch(col[p]);
      w[col[p]] = val[p];
    }

    while (!lower_queue.empty()) {
      const int k = lower_queue.top();
      lower_queue.pop();
      in_pattern[k] = 0;
      // Diagonal of U row k is stored first.
      const double lik = w[k] / u_v[u_off[k]];
      w[k] = 0.0;
      if (std::abs(lik) < tau || lik == 0.0) continue;
      l_col.push_back(k);
      l_v.push_back(lik);
      for (int p = u_off[k] + 1; p < u_off[k + 1]; ++p) {
        const int j = u_col[p];
        touch(j);
        w[j] -= lik * u_v[p];
      }
    }
    l_off.push_back(static_cast<int>(l_col.size()));

    double diag = w[i];
    if (std::abs(diag) <= kSingularPivotThreshold * norm_i || diag == 0.0) {
      const double scale = norm_i > 0.0 ? norm_i : 1.0;
      const double magnitude = std::max(drop_eps, std::sqrt(std::numeric_limits<double>::epsilon()));
      diag = std::signbit(diag) ? -magnitude * scale : magnitude * scale;
      ++repairs;
    }
    u_col.push_back(i);
    u_v.push_back(diag);
    std::sort(upper_pattern.begin(), upper_pattern.end());
    for (int j : upper_pattern) {
      in_pattern[j] = 0;
      if (j == i) continue;
      if (std::abs(w[j]) >= tau && w[j] != 0.0) {
        u_col.push_back(j);
        u_v.push_back(w[j]);
      }
      w[j] = 0.0;
    }
    w[i] = 0.0;
    u_off.push_back(static_cast<int>(u_col.size()));
  }

  // Row storage to column storage. Scanning rows in order leaves each column
  // sorted, which puts the L diagonal first and the U diagonal last.
  Factorization f;
  f.kind_ = FactorizationKind::ilut;
  f.n_ = n;
  f.drop_tol_ = drop_eps;
  f.pivot_repairs_ = repairs;

  f.l_ptr_.assign(n + 1, 0);
  for (int c : l_col) ++f.l_ptr_[c + 1];
  for (int j = 0; j < n; ++j) f.l_ptr_[j + 1] += f.l_ptr_[j] + 1;  // +1 for the unit diagonal
  {
    std::vector<int> next(f.l_ptr_.begin(), f.l_ptr_.end() - 1);
    f.l_idx_.resize(f.l_ptr_[n]);
    f.l_val_.resize(f.l_ptr_[n]);
    for (int j = 0; j < n; ++j) {
      f.l_idx_[next[j]] = j;
      f.l_val_[next[j]++] = 1.0;
    }
    for (int i = 0; i < n; ++i) {
      for (int p = l_off[i]; p < l_off[i + 1]; ++p) {
        const int c = l_col[p];
        f.l_idx_[next[c]] = i;
        f.l_val_[next[c]++] = l_v[p];
      }
    }
  }

  f.u_ptr_.assign(n + 1, 0);
  for (int c : u_col) ++f.u_ptr_[c + 1];
  for (int j = 0; j < n; ++j) f.u_ptr_[j + 1] += f.u_ptr_[j];
  {
    std::vector<int> next(f.u_ptr_.begin(), f.u_ptr_.end() - 1);
    f.u_idx_.resize(u_col.size());
    f.u_val_.resize(u_col.size());
    for (int i = 0; i < n; ++i) {
      for (int p = u_off[i]; p < u_off[i + 1]; ++p) {
        const int c = u_col[p];
        f.u_idx_[next[c]] = i;
        f.u_val_[next[c]++] = u_v[p];
      }
    }
  }
  return f;
}

Factorization ilut_factorize_shifted(const SparseMatrix& a, double gamma, double drop_eps,
                                     DropRule rule) {
  Factorization f = ilut_factorize(shifted(a, gamma), drop_eps, rule);
  f.shift_gamma_ = gamma;
  return f;
}

}  // namespace accurt
