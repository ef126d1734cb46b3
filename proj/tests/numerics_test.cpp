#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "support.hpp"

using namespace absorb;
using testing_support::cubic_largest_eigenvalue;
using testing_support::random_matrix;
using testing_support::random_symmetric_matrix;

TEST(LuSolve, SolvesSmallSystem) {
  Matrix a(2, 2);
  a << 4, 1, 2, 3;
  Vector b(2);
  b << 1, 2;
  const Vector x = lu_solve(a, b);
  EXPECT_NEAR(x(0), 0.1, 1e-15);
  EXPECT_NEAR(x(1), 0.6, 1e-15);
}

TEST(LuSolve, RejectsSingular) {
  Matrix a(2, 2);
  a << 1, 2, 2, 4;
  EXPECT_THROW(lu_solve(a, Vector::Ones(2)), SingularMatrix);
}

TEST(LuSolve, RejectsNearSingularByRelativePivot) {
  Matrix a(2, 2);
  a << 1e6, 1e6, 1e6, 1e6 + 1e-8;
  EXPECT_THROW(invert(a), SingularMatrix);
}

TEST(LuSolve, RejectsShapeAndNonFinite) {
  EXPECT_THROW(lu_solve(Matrix::Identity(2, 3), Vector::Ones(2)), PreconditionError);
  EXPECT_THROW(lu_solve(Matrix::Identity(2, 2), Vector::Ones(3)), PreconditionError);
  Matrix a = Matrix::Identity(2, 2);
  a(0, 1) = std::nan("");
  EXPECT_THROW(lu_solve(a, Vector::Ones(2)), PreconditionError);
}

TEST(Invert, MatchesEigenInverseOnRandomMatrices) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_matrix(rng, 6, 6) + 6.0 * Matrix::Identity(6, 6);
    EXPECT_LT(relative_difference(invert(a), a.inverse()), 1e-13);
  }
}

TEST(Pseudoinverse, MatchesOrthogonalDecompositionOnLaplacians) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = std::uniform_int_distribution<Eigen::Index>(2, 8)(rng);
    const Matrix l = laplacian_matrix(testing_support::random_strong_adjacency(rng, n));
    const Vector u = stationary_basis(l);
    const Matrix p = pseudoinverse_rank_deficient_1(l, u, Vector::Ones(n));
    EXPECT_LT(relative_difference(p, testing_support::svd_pinv(l)), 1e-9);
  }
}

TEST(Pseudoinverse, PenroseConditions) {
  std::mt19937_64 rng(13);
  const Matrix l = laplacian_matrix(testing_support::random_strong_adjacency(rng, 7));
  const Matrix p = pseudoinverse_rank_deficient_1(l, stationary_basis(l), Vector::Ones(7));
  EXPECT_LT(inf_norm(l * p * l - l), 1e-10);
  EXPECT_LT(inf_norm(p * l * p - p), 1e-10);
  EXPECT_LT(inf_norm((l * p).transpose() - l * p), 1e-10);
  EXPECT_LT(inf_norm((p * l).transpose() - p * l), 1e-10);
}

TEST(Pseudoinverse, RejectsBadKernels) {
  const Matrix l = laplacian_matrix(testing_support::path_adjacency(3));
  EXPECT_THROW(pseudoinverse_rank_deficient_1(l, Vector::Zero(3), Vector::Ones(3)),
               PreconditionError);
  EXPECT_THROW(pseudoinverse_rank_deficient_1(l, Vector::Ones(2), Vector::Ones(3)),
               PreconditionError);
}

TEST(SymmetricEigpair, DiagonalExample) {
  Matrix s = Vector(Eigen::Vector3d(1, 5, 3)).asDiagonal();
  const auto e = symmetric_leading_eigpair(s);
  EXPECT_NEAR(e.value, 5.0, 1e-10);
  EXPECT_NEAR(std::abs(e.vector(1)), 1.0, 1e-6);
}

TEST(SymmetricEigpair, LargestAlgebraicNotLargestMagnitude) {
  Matrix s = Vector(Eigen::Vector3d(-10, 1, 2)).asDiagonal();
  EXPECT_NEAR(symmetric_leading_eigpair(s).value, 2.0, 1e-9);
}

TEST(SymmetricEigpair, MatchesCharacteristicPolynomialOn3x3) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix a = random_symmetric_matrix(rng, 3);
    const auto e = symmetric_leading_eigpair(a, 1e-12);
    EXPECT_NEAR(e.value, cubic_largest_eigenvalue(a), 1e-9);
    EXPECT_NEAR(e.vector.norm(), 1.0, 1e-12);
  }
}

TEST(SymmetricEigpair, MatchesSelfAdjointSolver) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_symmetric_matrix(rng, 8);
    const double expected = Eigen::SelfAdjointEigenSolver<Matrix>(a).eigenvalues().maxCoeff();
    EXPECT_NEAR(symmetric_leading_eigpair(a).value, expected, 1e-8);
  }
}

TEST(SymmetricEigpair, OnesStartOrthogonalToLeadingVector) {
  // Leading eigenvector (1,-1)/sqrt2 is orthogonal to the all-ones start.
  Matrix s(2, 2);
  s << 0, -1, -1, 0;
  EXPECT_NEAR(symmetric_leading_eigpair(s).value, 1.0, 1e-9);
}

TEST(SymmetricEigpair, RejectsAsymmetric) {
  Matrix s(2, 2);
  s << 1, 2, 0, 1;
  EXPECT_THROW(symmetric_leading_eigpair(s), PreconditionError);
}

TEST(SymmetricEigpair, ThrowsWhenIterationBudgetTooSmall) {
  Matrix a(3, 3);
  a << 2, 1, 0, 1, 2, 1, 0, 1, 2;
  EXPECT_THROW(symmetric_leading_eigpair(a, 1e-14, 1), NoConvergence);
}

TEST(SymmetricEigpair, DeterministicForFixedSeed) {
  std::mt19937_64 rng(16);
  const Matrix a = random_symmetric_matrix(rng, 6);
  const auto x = symmetric_leading_eigpair(a);
  const auto y = symmetric_leading_eigpair(a);
  EXPECT_EQ(x.value, y.value);
  EXPECT_EQ(x.vector, y.vector);
}

TEST(SpectralRadius, MatchesEigenSolver) {
  std::mt19937_64 rng(16);
  int compared = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = random_matrix(rng, 5, 5).cwiseAbs();  // Perron root is real and dominant
    const double expected = Eigen::EigenSolver<Matrix>(m).eigenvalues().cwiseAbs().maxCoeff();
    EXPECT_NEAR(spectral_radius(m), expected, 1e-7 * expected);
    ++compared;
  }
  EXPECT_EQ(compared, 20);
}

TEST(SpectralRadius, NilpotentIsZero) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 1) = 1.0;
  m(1, 2) = 1.0;
  EXPECT_EQ(spectral_radius(m), 0.0);
  EXPECT_TRUE(spectral_radius_below_one(m * 10.0));
}

TEST(SpectralRadius, RotationDoesNotConverge) {
  Matrix m(2, 2);
  m << 0, -2, 2, 0;  // eigenvalues +-2i, norm of iterates is constant
  // Norm is constant so the estimate settles at 2 even though the vector rotates.
  EXPECT_NEAR(spectral_radius(m), 2.0, 1e-12);
  EXPECT_FALSE(spectral_radius_below_one(m));
}

TEST(Norms, InfinityAndOneNorms) {
  Matrix a(2, 2);
  a << 1, -2, 3, 4;
  EXPECT_EQ(inf_norm(a), 7.0);
  EXPECT_EQ(one_norm(a), 6.0);
  EXPECT_EQ(max_abs(a), 4.0);
  EXPECT_EQ(relative_difference(a, a), 0.0);
}
