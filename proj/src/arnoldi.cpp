#include "accurt/arnoldi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace accurt {

namespace {

constexpr Index kRefreshInterval = 50;

}  // namespace

ArnoldiState::ArnoldiState(KrylovMode mode, const Vector& v, double gamma, Index capacity)
    : mode_(mode), gamma_(gamma), capacity_(capacity) {
  if (capacity < 1) throw InvalidArgument("ArnoldiState: capacity must be >= 1");
  beta_ = v.norm();
  if (!(beta_ > 0) || !std::isfinite(beta_)) {
    throw InvalidArgument("ArnoldiState: starting vector must be nonzero and finite");
  }
  basis_.reserve(static_cast<std::size_t>(capacity + 1));
  basis_.push_back(v / beta_);
  hess_ = Matrix::Zero(capacity + 1, capacity);
}

ArnoldiState ArnoldiState::polynomial(const Vector& v, Index capacity) {
  return ArnoldiState(KrylovMode::polynomial, v, 0.0, capacity);
}

ArnoldiState ArnoldiState::shift_invert(const Vector& v, double gamma, Index capacity) {
  if (!(gamma > 0)) throw InvalidArgument("ArnoldiState: shift gamma must be positive");
  return ArnoldiState(KrylovMode::shift_invert, v, gamma, capacity);
}

Matrix ArnoldiState::basis_matrix(Index columns) const {
  const Index cols = columns < 0 ? basis_size() : columns;
  if (cols > basis_size()) throw DimensionError("basis_matrix: not enough basis vectors");
  Matrix v(dimension(), cols);
  for (Index j = 0; j < cols; ++j) v.col(j) = basis_[static_cast<std::size_t>(j)];
  return v;
}

void ArnoldiState::check_can_step(KrylovMode expected) const {
  if (mode_ != expected) throw InvalidArgument("Arnoldi step does not match the state's mode");
  if (exact_) throw InvalidArgument("Arnoldi step after a happy breakdown");
  if (k_ >= capacity_) {
    throw InvalidArgument("Arnoldi step beyond capacity " + std::to_string(capacity_));
  }
}

double ArnoldiState::orthogonalize(Vector& w) {
  const double pre_norm = w.norm();
  for (Index i = 0; i <= k_; ++i) {
    const double h = basis_[i].dot(w);
    hess_(i, k_) = h;
    w -= h * basis_[i];
  }
  if (w.norm() < pre_norm / std::sqrt(2.0)) {
    for (Index i = 0; i <= k_; ++i) {
      const double h = basis_[i].dot(w);
      hess_(i, k_) += h;
      w -= h * basis_[i];
    }
  }
  return pre_norm;
}

void ArnoldiState::accept(Vector w, double pre_norm, double scale) {
  const double h = w.norm();
  ++k_;
  if (h <= kBreakdownThreshold * scale || h == 0.0 || pre_norm == 0.0) {
    hess_(k_, k_ - 1) = 0.0;
    exact_ = true;
    return;
  }
  hess_(k_, k_ - 1) = h;
  basis_.push_back(w / h);
}

void arnoldi_step_polynomial(ArnoldiState& state, const SparseMatrix& a) {
  state.check_can_step(KrylovMode::polynomial);
  if (a.size() != state.dimension()) throw DimensionError("arnoldi_step_polynomial: size mismatch");
  Vector w = spmv(a, state.basis_[state.k_]);
  const double pre = state.orthogonalize(w);
  state.accept(std::move(w), pre, a.norm1());
  state.w_next_norm_ = 1.0;
}

void arnoldi_step_sai(ArnoldiState& state, const SparseMatrix& a, const ShiftedSolver& solver) {
  state.check_can_step(KrylovMode::shift_invert);
  if (a.size() != state.dimension()) throw DimensionError("arnoldi_step_sai: size mismatch");
  SolveResult solved = solver(state.basis_[state.k_]);
  state.inner_iterations_ += solved.stats.iterations;
  state.max_inner_per_step_ = std::max(state.max_inner_per_step_, solved.stats.iterations);
  Vector w = std::move(solved.x);
  const double pre = state.orthogonalize(w);
  state.accept(std::move(w), pre, pre);
  if (state.exact_) {
    state.w_next_norm_ = 0.0;
    return;
  }
  const Vector& next = state.basis_.back();
  state.w_next_norm_ = (next + state.gamma_ * spmv(a, next)).norm();
}

Matrix back_transform(const Matrix& h_tilde, double gamma) {
  if (h_tilde.rows() != h_tilde.cols()) throw DimensionError("back_transform: matrix not square");
  if (!(gamma > 0)) throw InvalidArgument("back_transform: gamma must be positive");
  const Index k = h_tilde.rows();
  const Eigen::PartialPivLU<Matrix> lu(h_tilde);
  // Eigen's estimator reports rcond = 1 for an exactly zero pivot.
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double rcond = pivots.minCoeff() == 0.0 ? 0.0 : lu.rcond();
  if (!(rcond >= 1e-14)) {
    throw SingularMatrixError("back_transform: projected SAI matrix is singular (rcond " +
                              std::to_string(rcond) + ")");
  }
  const Matrix id = Matrix::Identity(k, k);
  return (lu.solve(id) - id) / gamma;
}

Matrix projected_matrix(const ArnoldiState& state) {
  if (state.steps() == 0) return Matrix(0, 0);
  if (state.mode() == KrylovMode::polynomial) return state.square_hessenberg();
  return back_transform(state.square_hessenberg(), state.gamma());
}

Vector projected_solution(const Matrix& h, double beta, double s, Index size_cap) {
  if (!(s >= 0)) throw InvalidArgument("projected_solution: s must be nonnegative");
  Vector e1 = Vector::Zero(h.rows());
  if (h.rows() > 0) e1(0) = beta;
  return expm_action_small(h, s, e1, size_cap);
}

double residual_norm_from(const ArnoldiState& state, const Matrix& h, const Vector& u) {
  const Index k = state.steps();
  if (k < 1) throw InvalidArgument("residual_norm: no Arnoldi steps taken");
  if (h.rows() != k || u.size() != k) throw DimensionError("residual_norm: size mismatch");
  const double sub = state.subdiagonal();
  if (sub == 0.0) return 0.0;
  if (state.mode() == KrylovMode::polynomial) return std::abs(sub * u(k - 1));
  const double gamma = state.gamma();
  const double ek_shifted = u(k - 1) + gamma * h.row(k - 1).dot(u);
  return std::abs(sub / gamma * ek_shifted) * state.w_next_norm();
}

double residual_norm(const ArnoldiState& state, const Matrix& h, double s) {
  return residual_norm_from(state, h, projected_solution(h, state.beta(), s));
}

ResidualSamples residual_samples(const ArnoldiState& state, const Matrix& h, double t,
                                 Index count) {
  if (count < 1) throw InvalidArgument("residual_samples: need at least one sample");
  if (!(t > 0)) throw InvalidArgument("residual_samples: t must be positive");
  ResidualSamples out;
  out.times.reserve(count);
  out.norms.reserve(count);
  const double step = t / static_cast<double>(count);
  const Matrix propagator = expm(-step * h);
  Vector u = Vector::Zero(h.rows());
  if (u.size() > 0) u(0) = state.beta();
  for (Index j = 1; j <= count; ++j) {
    const double s = j == count ? t : static_cast<double>(j) * t / static_cast<double>(count);
    if (j % kRefreshInterval == 0) {
      u = projected_solution(h, state.beta(), s);
    } else {
      u = propagator * u;
    }
    out.times.push_back(s);
    out.norms.push_back(residual_norm_from(state, h, u));
  }
  return out;
}

double omega_k(const Matrix& h_tilde, double gamma) {
  if (!(gamma > 0)) throw InvalidArgument("omega_k: gamma must be positive");
  const double norm = spectral_norm(h_tilde);
  if (!(norm > 0)) throw InvalidArgument("omega_k: ||H~_k|| must be positive");
  return (1.0 / norm - 1.0) / gamma;
}

double residual_bound(const ArnoldiState& state, const Matrix& h, double s) {
  if (state.mode() != KrylovMode::shift_invert) {
    throw InvalidArgument("residual_bound: only defined for SAI states");
  }
  const Index k = state.steps();
  if (k < 1) throw InvalidArgument("residual_bound: no Arnoldi steps taken");
  if (h.rows() != k || h.cols() != k) throw DimensionError("residual_bound: size mismatch");
  if (!(s >= 0)) throw InvalidArgument("residual_bound: s must be nonnegative");
  const double gamma = state.gamma();
  const double sub = state.subdiagonal();
  const double omega = omega_k(state.square_hessenberg(), gamma);
  const Matrix shifted_h = Matrix::Identity(k, k) + gamma * h;
  const double early = s * spectral_norm(shifted_h * h) * phi(-s * omega);
  const double late = spectral_norm(shifted_h) * (1.0 + std::exp(-s * omega));
  // |beta_k(0)| / (beta h~_{k+1,k}) = |e_k^T (I + gamma H) e_1| / gamma; the
  // identity part only survives for k = 1.
  const double start = std::abs(h(k - 1, 0) + (k == 1 ? 1.0 / gamma : 0.0));
  return state.beta() * sub * (std::min(early, late) / gamma + start) * state.w_next_norm();
}

Vector assemble_iterate(const ArnoldiState& state, const Vector& u) {
  const Index k = u.size();
  if (k > state.basis_size() || k > std::max<Index>(state.steps(), 1)) {
    throw DimensionError("assemble_iterate: coefficient vector longer than the basis");
  }
  Vector y = Vector::Zero(state.dimension());
  for (Index i = 0; i < k; ++i) y += u(i) * state.basis_vector(i);
  return y;
}

}  // namespace accurt
