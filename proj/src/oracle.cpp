#include "accurt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "accurt/arnoldi.hpp"
#include "accurt/dense.hpp"

namespace accurt {

namespace {

constexpr Index kResidualSamples = 20;

Reference dense_reference(const SparseMatrix& a, const Vector& v, double t) {
  const Index n = a.size();
  const Matrix dense = a.to_dense();
  Reference ref;
  ref.method = ReferenceMethod::dense_expm;
  ref.solution = expm(-t * dense, n) * v;
  const Matrix half = expm(-(t / 2.0) * dense, n);
  const Vector twice = half * (half * v);
  ref.accuracy = (twice - ref.solution).norm();
  return ref;
}

// Largest residual over s_j = j t / count, the propagator advancing u.
double max_residual(const Matrix& h, double beta, double sub, double t, Index& samples_out) {
  const Index k = h.rows();
  const Matrix step = expm(-(t / static_cast<double>(kResidualSamples)) * h, k);
  Vector u = Vector::Zero(k);
  u(0) = beta;
  double worst = 0.0;
  for (Index j = 1; j <= kResidualSamples; ++j) {
    u = step * u;
    worst = std::max(worst, std::abs(sub * u(k - 1)));
  }
  samples_out = kResidualSamples;
  return worst;
}

Reference krylov_reference(const SparseMatrix& a, const Vector& v, double t,
                           const KrylovReferenceOptions& options) {
  if (options.max_steps < 1 || options.check_every < 1 || !(options.residual_tol > 0)) {
    throw InvalidArgument("reference_solution: invalid Krylov options");
  }
  const double beta = v.norm();
  const Index cap = std::min(options.max_steps, a.size());
  ArnoldiState state = ArnoldiState::polynomial(v, cap);
  double last_residual = 0.0;
  for (Index k = 1; k <= cap; ++k) {
    arnoldi_step_polynomial(state, a);
    if (!state.exact() && k % options.check_every != 0 && k != cap) continue;
    const Matrix h = state.square_hessenberg();
    Index samples = 0;
    last_residual = state.exact() ? 0.0 : max_residual(h, beta, state.subdiagonal(), t, samples);
    if (last_residual <= options.residual_tol * beta) {
      Vector e1 = Vector::Zero(k);
      e1(0) = beta;
      Reference ref;
      ref.method = ReferenceMethod::polynomial_krylov;
      ref.solution = assemble_iterate(state, expm(-t * h, k) * e1);
      ref.accuracy = t * last_residual;
      ref.krylov_steps = k;
      return ref;
    }
  }
  throw Error("reference_solution: Krylov residual " + std::to_string(last_residual) +
              " still above the target after " + std::to_string(cap) + " steps");
}

}  // namespace

Reference reference_solution(const SparseMatrix& a, const Vector& v, double t,
                             ReferenceMethod method, const KrylovReferenceOptions& options) {
  if (a.size() != v.size()) throw DimensionError("reference_solution: size mismatch");
  if (!(t >= 0) || !std::isfinite(t)) throw InvalidArgument("reference_solution: t must be >= 0");
  if (t == 0.0 || v.norm() == 0.0) {
    Reference ref;
    ref.method = method == ReferenceMethod::polynomial_krylov ? method : ReferenceMethod::dense_expm;
    ref.solution = v;
    return ref;
  }
  if (method == ReferenceMethod::automatic) {
    method = a.size() <= kDenseReferenceLimit ? ReferenceMethod::dense_expm
                                              : ReferenceMethod::polynomial_krylov;
  }
  if (method == ReferenceMethod::dense_expm) return dense_reference(a, v, t);
  return krylov_reference(a, v, t, options);
}

double true_error(const Vector& y, const Reference& ref) {
  if (y.size() != ref.solution.size()) throw DimensionError("true_error: size mismatch");
  return (y - ref.solution).norm();
}

const char* to_string(ReferenceMethod method) {
  switch (method) {
    case ReferenceMethod::automatic: return "automatic";
    case ReferenceMethod::dense_expm: return "dense-expm";
    case ReferenceMethod::polynomial_krylov: return "polynomial-krylov";
  }
  return "?";
}

}  // namespace accurt
