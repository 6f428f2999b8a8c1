#pragma once

// Small dense kernels used on projected (Hessenberg) matrices: the matrix
// exponential, its action, the phi function and the spectral norm.
//
// Everything here is templated on the Eigen expression type so it accepts
// blocks, maps and products without forcing a copy at the call site.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <type_traits>

#include "accurt/error.hpp"

namespace accurt {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = DenseMatrix<double>;
using Vector = DenseVector<double>;
using Index = Eigen::Index;

/// Largest dimension expm() accepts unless the caller raises the cap.
inline constexpr Index kExpmSizeCap = 64;

namespace detail {

template <typename Derived>
void require_square_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected square");
  }
  if (!m.allFinite()) {
    throw InvalidArgument(std::string(what) + ": matrix has non-finite entries");
  }
}

template <typename Scalar>
Scalar norm1(const DenseMatrix<Scalar>& m) {
  if (m.size() == 0) return Scalar(0);
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

// Diagonal Pade approximant r_m(A) = (V - U)^{-1} (V + U) for m in {3,5,7,9,13}.
template <typename Scalar>
DenseMatrix<Scalar> pade_approximant(const DenseMatrix<Scalar>& a, int degree) {
  const Index n = a.rows();
  const DenseMatrix<Scalar> id = DenseMatrix<Scalar>::Identity(n, n);
  const DenseMatrix<Scalar> a2 = a * a;
  DenseMatrix<Scalar> u;
  DenseMatrix<Scalar> v;

  switch (degree) {
    case 3: {
      const Scalar b[] = {120., 60., 12., 1.};
      u = a * (b[3] * a2 + b[1] * id);
      v = b[2] * a2 + b[0] * id;
      break;
    }
    case 5: {
      const Scalar b[] = {30240., 15120., 3360., 420., 30., 1.};
      const DenseMatrix<Scalar> a4 = a2 * a2;
      u = a * (b[5] * a4 + b[3] * a2 + b[1] * id);
      v = b[4] * a4 + b[2] * a2 + b[0] * id;
      break;
    }
    case 7: {
      const Scalar b[] = {17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.};
      const DenseMatrix<Scalar> a4 = a2 * a2;
      const DenseMatrix<Scalar> a6 = a4 * a2;
      u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
      v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
      break;
    }
    case 9: {
      const Scalar b[] = {17643225600., 8821612800., 2075673600., 302702400., 30270240.,
                          2162160.,     110880.,     3960.,       90.,        1.};
      const DenseMatrix<Scalar> a4 = a2 * a2;
      const DenseMatrix<Scalar> a6 = a4 * a2;
      const DenseMatrix<Scalar> a8 = a6 * a2;
      u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
      v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
      break;
    }
    default: {
      const Scalar b[] = {64764752532480000., 32382376266240000., 7771770303897600.,
                          1187353796428800.,  129060195264000.,   10559470521600.,
                          670442572800.,      33522128640.,       1323241920.,
                          40840800.,          960960.,            16380.,
                          182.,               1.};
      const DenseMatrix<Scalar> a4 = a2 * a2;
      const DenseMatrix<Scalar> a6 = a4 * a2;
      const DenseMatrix<Scalar> inner_u = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
      u = a * (inner_u + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
      v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
          b[0] * id;
      break;
    }
  }
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace detail

/// exp(M) by scaling and squaring with a diagonal Pade approximant of degree
/// 3, 5, 7, 9 or 13 picked from the 1-norm of M. The switch points are the
/// double-precision backward-error thresholds, so other scalar types get the
/// same degree selection.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> expm(const Eigen::MatrixBase<Derived>& m,
                                           Index size_cap = kExpmSizeCap) {
  using Scalar = typename Derived::Scalar;
  static_assert(std::is_floating_point_v<Scalar>, "expm needs a real floating-point scalar");
  detail::require_square_finite(m, "expm");
  if (m.rows() > size_cap) {
    throw InvalidArgument("expm: dimension " + std::to_string(m.rows()) + " exceeds the cap " +
                          std::to_string(size_cap));
  }

  DenseMatrix<Scalar> a = m.eval();
  const Index n = a.rows();
  if (n == 0) return a;

  const Scalar theta[] = {1.495585217958292e-2, 2.539398330063230e-1, 9.504178996162932e-1,
                          2.097847961257068e0};
  const int degrees[] = {3, 5, 7, 9};
  const Scalar norm = detail::norm1(a);
  for (int i = 0; i < 4; ++i) {
    if (norm <= theta[i]) return detail::pade_approximant(a, degrees[i]);
  }

  constexpr Scalar theta13 = 5.371920351148152;
  int squarings = 0;
  if (norm > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    a /= std::ldexp(Scalar(1), squarings);
  }
  DenseMatrix<Scalar> r = detail::pade_approximant(a, 13);
  for (int i = 0; i < squarings; ++i) r = (r * r).eval();
  return r;
}

/// exp(-t M) w for a small square M.
template <typename DerivedM, typename DerivedW>
DenseVector<typename DerivedM::Scalar> expm_action_small(const Eigen::MatrixBase<DerivedM>& m,
                                                         typename DerivedM::Scalar t,
                                                         const Eigen::MatrixBase<DerivedW>& w,
                                                         Index size_cap = kExpmSizeCap) {
  if (m.rows() != m.cols() || w.size() != m.rows()) {
    throw DimensionError("expm_action_small: matrix " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " vs vector of length " +
                         std::to_string(w.size()));
  }
  if (!(t >= 0)) throw InvalidArgument("expm_action_small: t must be nonnegative");
  if (t == 0) return w;
  return expm(-t * m, size_cap) * w;
}

/// Below this magnitude phi() switches to its Taylor series.
inline constexpr double kPhiSeriesThreshold = 1e-5;

/// phi(z) = (e^z - 1) / z with phi(0) = 1.
template <typename Scalar>
Scalar phi(Scalar z) {
  static_assert(std::is_floating_point_v<Scalar>);
  if (std::abs(z) < Scalar(kPhiSeriesThreshold)) return Scalar(1) + z / 2 + z * z / 6;
  return std::expm1(z) / z;
}

/// Largest singular value.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return Scalar(0);
  if (!m.allFinite()) throw InvalidArgument("spectral_norm: matrix has non-finite entries");
  const DenseMatrix<Scalar> a = m.eval();
  Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(a);
  return svd.singularValues()(0);
}

}  // namespace accurt
