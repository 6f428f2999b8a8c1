#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "accurt/oracle.hpp"
#include "accurt/problems.hpp"
#include "instances.hpp"

namespace accurt {
namespace {

TEST(Reference, ZeroMatrixGivesV) {
  const Vector v = testing::random_unit_vector(30, 1);
  for (auto method : {ReferenceMethod::dense_expm, ReferenceMethod::polynomial_krylov}) {
    const auto ref = reference_solution(SparseMatrix::zero(30), v, 2.0, method);
    EXPECT_LT((ref.solution - v).norm(), 1e-15) << to_string(method);
  }
}

TEST(Reference, DiagonalIsElementwise) {
  std::vector<Triplet> t;
  for (int i = 0; i < 12; ++i) t.emplace_back(i, i, 0.5 * i);
  const auto a = SparseMatrix::from_triplets(12, t);
  const Vector v = testing::random_unit_vector(12, 2);
  for (double time : {0.0, 0.3, 4.0}) {
    for (auto method : {ReferenceMethod::dense_expm, ReferenceMethod::polynomial_krylov}) {
      const auto ref = reference_solution(a, v, time, method);
      for (int i = 0; i < 12; ++i) {
        EXPECT_NEAR(ref.solution(i), std::exp(-time * 0.5 * i) * v(i), 1e-13) << to_string(method);
      }
    }
  }
}

TEST(Reference, DensePathMatchesEigen) {
  const auto a = testing::random_accretive(60, 3, 2.0, 2.0);
  const Vector v = testing::random_unit_vector(60, 4);
  const auto ref = reference_solution(a, v, 1.5);
  EXPECT_EQ(ref.method, ReferenceMethod::dense_expm);
  EXPECT_LT((ref.solution - testing::eigen_expm_action(a.to_dense(), 1.5, v)).norm(), 1e-13);
  EXPECT_LE(ref.accuracy, 1e-12);
}

TEST(Reference, DensePathAccuracyEstimateIsSmall) {
  const auto a = convection_diffusion_matrix(22, 200.0);
  const auto ref = reference_solution(a, conv_diff_initial(22), 1.0, ReferenceMethod::dense_expm);
  EXPECT_LE(ref.accuracy, 1e-12);
  EXPECT_EQ(ref.krylov_steps, 0);
}

TEST(Reference, DenseAndKrylovAgreeOnConvDiff) {
  const auto a = convection_diffusion_matrix(12, 200.0);
  const Vector v = conv_diff_initial(12);
  const auto dense = reference_solution(a, v, 1.0, ReferenceMethod::dense_expm);
  const auto krylov = reference_solution(a, v, 1.0, ReferenceMethod::polynomial_krylov);
  EXPECT_EQ(krylov.method, ReferenceMethod::polynomial_krylov);
  EXPECT_GT(krylov.krylov_steps, 0);
  EXPECT_LE(true_error(krylov.solution, dense), 1e-11);
}

TEST(Reference, AutomaticChoiceFollowsSize) {
  const Vector v1 = Vector::Ones(100).normalized();
  EXPECT_EQ(reference_solution(SparseMatrix::identity(100), v1, 1.0).method, ReferenceMethod::dense_expm);
  const Vector v2 = Vector::Ones(2500).normalized();
  EXPECT_EQ(reference_solution(SparseMatrix::identity(2500), v2, 1.0).method,
            ReferenceMethod::polynomial_krylov);
}

TEST(Reference, KrylovCapIsReported) {
  const auto a = convection_diffusion_matrix(32, 200.0);
  KrylovReferenceOptions options;
  options.max_steps = 20;
  EXPECT_THROW(reference_solution(a, conv_diff_initial(32), 1.0, ReferenceMethod::polynomial_krylov, options),
               Error);
}

TEST(Reference, RejectsNegativeTime) {
  EXPECT_THROW(reference_solution(SparseMatrix::identity(3), Vector::Ones(3), -1.0), InvalidArgument);
}

TEST(Reference, NonExpansiveOnAccretiveMatrices) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto a = testing::random_accretive(50, seed, 1.0, 3.0);
    const Vector v = testing::random_unit_vector(50, seed + 10);
    for (double t : {0.1, 1.0, 10.0}) {
      EXPECT_LE(reference_solution(a, v, t).solution.norm(), v.norm() * (1.0 + 1e-10));
    }
  }
  const auto cd = convection_diffusion_matrix(52, 1000.0);
  const Vector v = conv_diff_initial(52);
  EXPECT_LE(reference_solution(cd, v, 1.0, ReferenceMethod::polynomial_krylov).solution.norm(), 1.0 + 1e-10);
}

TEST(TrueError, Examples) {
  Reference ref;
  ref.solution = testing::random_unit_vector(5, 7);
  EXPECT_EQ(true_error(ref.solution, ref), 0.0);
  Vector y = ref.solution;
  y(0) += 1e-7;
  // Adding to an entry of size <= 1 rounds by at most half an ulp of 1.
  EXPECT_NEAR(true_error(y, ref), 1e-7, std::numeric_limits<double>::epsilon());
  EXPECT_THROW(true_error(Vector::Zero(4), ref), DimensionError);
}

}  // namespace
}  // namespace accurt
