#pragma once

// Arnoldi processes for exp(-tA)v: the polynomial one on A and the
// shift-and-invert (SAI) one on (I + gamma A)^{-1}, plus everything that is
// evaluated on the small projected problem: the back-transformed projection,
// the Galerkin solution u(s), the residual norm as a function of time and
// its a priori bound.

#include <functional>
#include <vector>

#include "accurt/dense.hpp"
#include "accurt/iterative.hpp"
#include "accurt/sparse_matrix.hpp"

namespace accurt {

enum class KrylovMode { polynomial, shift_invert };

/// Solves (I + gamma A) w = b for the SAI Arnoldi step.
using ShiftedSolver = std::function<SolveResult(const Vector&)>;

/// Below this relative size the new Arnoldi direction counts as zero and the
/// Krylov subspace as invariant.
inline constexpr double kBreakdownThreshold = 1e-14;

/// Orthonormal basis V_{k+1} and Hessenberg matrix of an Arnoldi run
/// started from v. In SAI mode the Hessenberg matrix is the projection of
/// (I + gamma A)^{-1}; in polynomial mode it is the projection of A.
class ArnoldiState {
 public:
  static ArnoldiState polynomial(const Vector& v, Index capacity);
  static ArnoldiState shift_invert(const Vector& v, double gamma, Index capacity);

  KrylovMode mode() const { return mode_; }
  double gamma() const { return gamma_; }
  double beta() const { return beta_; }
  Index steps() const { return k_; }
  Index capacity() const { return capacity_; }
  Index dimension() const { return basis_.front().size(); }
  /// Set by a happy breakdown: the last step produced no new direction.
  bool exact() const { return exact_; }

  const Vector& basis_vector(Index i) const { return basis_.at(static_cast<std::size_t>(i)); }
  /// Number of stored basis vectors: k + 1, or k after a breakdown.
  Index basis_size() const { return static_cast<Index>(basis_.size()); }
  /// V_j as a dense n x j matrix (j = basis_size() by default).
  Matrix basis_matrix(Index columns = -1) const;

  /// The (k+1) x k upper Hessenberg matrix.
  Matrix hessenberg() const { return hess_.topLeftCorner(k_ + 1, k_); }
  /// Its leading k x k block.
  Matrix square_hessenberg() const { return hess_.topLeftCorner(k_, k_); }
  /// h_{k+1,k}; zero after a breakdown.
  double subdiagonal() const { return k_ == 0 ? 0.0 : hess_(k_, k_ - 1); }

  /// ||(I + gamma A) v_{k+1}|| in SAI mode, 1 in polynomial mode.
  double w_next_norm() const { return w_next_norm_; }
  /// Inner solver iterations spent by all SAI steps so far.
  Index inner_iterations() const { return inner_iterations_; }
  /// Largest inner iteration count of a single step.
  Index max_inner_per_step() const { return max_inner_per_step_; }

 private:
  friend void arnoldi_step_polynomial(ArnoldiState&, const SparseMatrix&);
  friend void arnoldi_step_sai(ArnoldiState&, const SparseMatrix&, const ShiftedSolver&);

  ArnoldiState(KrylovMode mode, const Vector& v, double gamma, Index capacity);
  void check_can_step(KrylovMode expected) const;
  // Orthogonalizes w against the basis and writes the coefficients into
  // column k_ of the Hessenberg matrix; returns ||w|| before projection.
  double orthogonalize(Vector& w);
  void accept(Vector w, double pre_norm, double scale);

  KrylovMode mode_;
  double gamma_ = 0.0;
  double beta_ = 0.0;
  Index capacity_ = 0;
  Index k_ = 0;
  bool exact_ = false;
  std::vector<Vector> basis_;
  Matrix hess_;
  double w_next_norm_ = 1.0;
  Index inner_iterations_ = 0;
  Index max_inner_per_step_ = 0;
};

/// One Arnoldi step on A: A V_k = V_{k+1} H_k.
void arnoldi_step_polynomial(ArnoldiState& state, const SparseMatrix& a);

/// One SAI step: w = (I + gamma A)^{-1} v_k via `solver`, orthogonalized
/// into column k of H~, then ||(I + gamma A) v_{k+1}|| is cached for the
/// residual formula.
void arnoldi_step_sai(ArnoldiState& state, const SparseMatrix& a, const ShiftedSolver& solver);

/// H = (H~^{-1} - I) / gamma. Throws SingularMatrixError when H~ has a
/// reciprocal condition estimate below 1e-14.
Matrix back_transform(const Matrix& h_tilde, double gamma);

/// The k x k projection of A the state defines: H_k itself in polynomial mode,
/// the back-transformed H~_k in SAI mode.
Matrix projected_matrix(const ArnoldiState& state);

/// u(s) = exp(-s H) beta e_1.
Vector projected_solution(const Matrix& h, double beta, double s, Index size_cap = kExpmSizeCap);

/// ||r_k(s)|| for r_k(s) = -A y_k(s) - y_k'(s), from small quantities only:
/// |h_{k+1,k} e_k^T u(s)| in polynomial mode and
/// |h~_{k+1,k} / gamma * e_k^T (I + gamma H_k) u(s)| * ||(I + gamma A) v_{k+1}|| in SAI mode.
double residual_norm(const ArnoldiState& state, const Matrix& h, double s);

/// Same as residual_norm() for an already computed u(s).
double residual_norm_from(const ArnoldiState& state, const Matrix& h, const Vector& u);

struct ResidualSamples {
  std::vector<double> times;
  std::vector<double> norms;
};

/// ||r_k(s_j)|| on s_j = j t / count, j = 1..count (the last one is t
/// exactly). u is advanced with the
/// one-step propagator exp(-(t/count) H) and re-evaluated directly every 50
/// samples.
ResidualSamples residual_samples(const ArnoldiState& state, const Matrix& h, double t,
                                 Index count);

/// omega_k = (1 / ||H~_k|| - 1) / gamma.
double omega_k(const Matrix& h_tilde, double gamma);

/// Upper bound on ||r_k(s)|| in SAI mode:
/// beta h~_{k+1,k} (min{s ||(I+gH)H|| phi(-s w), ||I+gH|| (1 + e^{-s w})} / g + |h_{k,1}|)
///   * ||(I + gamma A) v_{k+1}||
/// with g = gamma and w = omega_k. For k = 1 the last term is |1/g + h_{1,1}|,
/// the exact value of |e_k^T (I + gH) e_1| / g.
double residual_bound(const ArnoldiState& state, const Matrix& h, double s);

/// y = V_k u.
Vector assemble_iterate(const ArnoldiState& state, const Vector& u);

}  // namespace accurt
