// Copyright 2026 The AIFlow Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <Eigen/Dense>
#include <cmath>
#include <gtest/gtest.h>
#include <limits>

#include "aiflow/error.h"
#include "aiflow/numerics/linalg.h"
#include "aiflow/numerics/matrix.h"
#include "aiflow/numerics/rng.h"

namespace aiflow {
namespace {

Matrix RandomMatrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (double& v : m.mutable_data()) v = rng.Normal();
  return m;
}

double OrthonormalityError(const Matrix& q) {
  const Matrix gram = q.Transpose() * q;
  return (gram - Matrix::Identity(gram.rows())).MaxAbs();
}

TEST(MatrixTest, RejectsNonFiniteData) {
  EXPECT_THROW(Matrix(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}), Error);
  EXPECT_THROW(Matrix(2, 2, {1.0, 2.0, 3.0}), Error);
}

TEST(MatrixTest, ProductAndTranspose) {
  const Matrix a = Matrix::FromRows({{1, 2, 3}, {4, 5, 6}});
  const Matrix b = Matrix::FromRows({{1, 0}, {0, 1}, {1, 1}});
  EXPECT_EQ(a * b, Matrix::FromRows({{4, 5}, {10, 11}}));
  EXPECT_EQ(MultiplyTransposed(a, a), a * a.Transpose());
  EXPECT_THROW(a * a, Error);
}

TEST(SvdTest, IdentityHasUnitSingularValues) {
  const SvdResult svd = SvdReduced(Matrix::Identity(2));
  EXPECT_DOUBLE_EQ(svd.sigma[0], 1.0);
  EXPECT_DOUBLE_EQ(svd.sigma[1], 1.0);
  // Up to column sign, and the sign rule makes the leading entries positive.
  EXPECT_NEAR(std::abs(svd.u(0, 0)) + std::abs(svd.u(1, 1)), 2.0, 1e-15);
  EXPECT_LT((Reconstruct(svd) - Matrix::Identity(2)).MaxAbs(), 1e-15);
}

TEST(SvdTest, ZeroMatrixKeepsOrthonormalFactors) {
  const SvdResult svd = SvdReduced(Matrix(3, 2));
  ASSERT_EQ(svd.sigma.size(), 2u);
  EXPECT_EQ(svd.sigma[0], 0.0);
  EXPECT_EQ(svd.sigma[1], 0.0);
  EXPECT_LT(OrthonormalityError(svd.u), 1e-12);
  EXPECT_LT(OrthonormalityError(svd.v), 1e-12);
}

TEST(SvdTest, TwoByTwoMatchesCharacteristicPolynomial) {
  // A^T A = [[25, 20], [20, 25]] has eigenvalues 45 and 5.
  const SvdResult svd = SvdReduced(Matrix::FromRows({{3, 0}, {4, 5}}));
  EXPECT_NEAR(svd.sigma[0], std::sqrt(45.0), 1e-14);
  EXPECT_NEAR(svd.sigma[1], std::sqrt(5.0), 1e-14);
}

TEST(SvdTest, RejectsNonFiniteInput) {
  Matrix a(2, 2);
  a(0, 1) = std::numeric_limits<double>::infinity();
  try {
    SvdReduced(a);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidInput);
  }
}

TEST(SvdTest, SignConventionMakesLeadingEntriesNonNegative) {
  Rng rng(11);
  const SvdResult svd = SvdReduced(RandomMatrix(rng, 5, 3));
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < 5; ++i) {
      if (std::abs(svd.u(i, k)) > 1e-12) {
        EXPECT_GT(svd.u(i, k), 0.0);
        break;
      }
    }
  }
}

TEST(SvdTest, RandomMatricesReconstructAndMatchEigen) {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + rng.NextU64() % 32;
    const std::size_t n = 1 + rng.NextU64() % 32;
    Matrix a = RandomMatrix(rng, m, n);
    if (trial % 5 == 0 && m > 2 && n > 2) {
      // Force rank deficiency: replace the last column with a mix of two others.
      for (std::size_t i = 0; i < m; ++i) a(i, n - 1) = a(i, 0) - 2.0 * a(i, 1);
    }
    const SvdResult svd = SvdReduced(a);
    const std::size_t r = std::min(m, n);
    ASSERT_EQ(svd.sigma.size(), r);
    EXPECT_LE((a - Reconstruct(svd)).FrobeniusNorm(), 1e-8 * (1.0 + a.FrobeniusNorm()))
        << m << "x" << n;
    EXPECT_LT(OrthonormalityError(svd.u), 1e-9);
    EXPECT_LT(OrthonormalityError(svd.v), 1e-9);
    for (std::size_t k = 0; k + 1 < r; ++k) EXPECT_GE(svd.sigma[k], svd.sigma[k + 1]);

    Eigen::MatrixXd e(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) e(i, j) = a(i, j);
    const Eigen::VectorXd ref = Eigen::JacobiSVD<Eigen::MatrixXd>(e).singularValues();
    for (std::size_t k = 0; k < r; ++k)
      EXPECT_NEAR(svd.sigma[k], ref(static_cast<Eigen::Index>(k)), 1e-10 * (1.0 + ref(0)));
  }
}

TEST(CholeskyTest, IdentityIsItsOwnFactor) {
  EXPECT_EQ(CholeskyLower(Matrix::Identity(3)), Matrix::Identity(3));
}

TEST(CholeskyTest, HandWorkedTwoByTwo) {
  const Matrix l = CholeskyLower(Matrix::FromRows({{4, 2}, {2, 5}}));
  EXPECT_LT((l - Matrix::FromRows({{2, 0}, {1, 2}})).MaxAbs(), 1e-15);
}

TEST(CholeskyTest, IndefiniteMatrixReportsPivot) {
  try {
    CholeskyLower(Matrix::FromRows({{1, 2}, {2, 1}}));
    FAIL() << "expected NotPositiveDefiniteError";
  } catch (const NotPositiveDefiniteError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotPositiveDefinite);
    EXPECT_EQ(e.pivot_index(), 1u);
  }
}

TEST(CholeskyTest, RejectsAsymmetricInput) {
  EXPECT_THROW(CholeskyLower(Matrix::FromRows({{2, 1}, {0, 2}})), Error);
}

TEST(CholeskyTest, RandomSpdRoundTrip) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.NextU64() % 24;
    const Matrix g = RandomMatrix(rng, n, n);
    Matrix a = MultiplyTransposed(g, g) + Matrix::Identity(n);
    const Matrix l = CholeskyLower(a);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) ASSERT_EQ(l(i, j), 0.0);
    EXPECT_LE((MultiplyTransposed(l, l) - a).FrobeniusNorm(),
              1e-9 * std::max(1.0, a.FrobeniusNorm()));
  }
}

TEST(TriangularSolveTest, IdentityReturnsRightHandSide) {
  const Matrix b = Matrix::FromRows({{1, -2}, {3.5, 4}, {0, 7}});
  EXPECT_EQ(SolveLowerTriangular(Matrix::Identity(3), b), b);
}

TEST(TriangularSolveTest, ForwardSubstitutionByHand) {
  const Matrix y = SolveLowerTriangular(Matrix::FromRows({{2, 0}, {1, 2}}),
                                        Matrix::FromRows({{2}, {3}}));
  EXPECT_EQ(y, Matrix::FromRows({{1}, {1}}));
}

TEST(TriangularSolveTest, ZeroDiagonalIsSingular) {
  try {
    SolveLowerTriangular(Matrix::FromRows({{1, 0}, {1, 0}}), Matrix::FromRows({{1}, {1}}));
    FAIL() << "expected singular-triangular";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingularTriangular);
  }
}

TEST(TriangularSolveTest, RandomResiduals) {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.NextU64() % 16;
    const Matrix g = RandomMatrix(rng, n, n);
    const Matrix s = CholeskyLower(MultiplyTransposed(g, g) + Matrix::Identity(n));
    const Matrix b = RandomMatrix(rng, n, 3);
    const Matrix y = SolveLowerTriangular(s, b);
    EXPECT_LE((s * y - b).FrobeniusNorm(), 1e-9 * b.FrobeniusNorm());
    const Matrix z = SolveLowerTriangularTransposed(s, b);
    EXPECT_LE((s.Transpose() * z - b).FrobeniusNorm(), 1e-9 * b.FrobeniusNorm());
  }
}

TEST(RngTest, MatchesReferenceXorshift64Star) {
  // Reference values from an independent Python transcription of the update
  // rule documented in rng.h.
  Rng rng(42);
  EXPECT_EQ(rng.NextU64(), 0x31b0ece7c4f697a2ULL);
  EXPECT_EQ(rng.NextU64(), 0x9008a3b1cb686f03ULL);
  EXPECT_EQ(rng.NextU64(), 0x7c7173abd97be16fULL);
  EXPECT_DOUBLE_EQ(Rng(42).Uniform(), 0.1941059175341826);
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(123);
  Rng b(123);
  for (int i = 0; i < 10000; ++i) {
    ASSERT_EQ(a.NextU64(), b.NextU64());
    ASSERT_EQ(a.Normal(), b.Normal());
  }
}

TEST(RngTest, UniformRangeAndNormalMoments) {
  Rng rng(5);
  double sum = 0.0;
  double sum_sq = 0.0;
  constexpr int kDraws = 200000;
  for (int i = 0; i < kDraws; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double z = rng.Normal();
    sum += z;
    sum_sq += z * z;
  }
  EXPECT_NEAR(sum / kDraws, 0.0, 0.01);
  EXPECT_NEAR(sum_sq / kDraws, 1.0, 0.02);
}

TEST(RngTest, DerivedStreamsDependOnKeys) {
  EXPECT_EQ(Rng::Derive(1, {2, 3}).NextU64(), Rng::Derive(1, {2, 3}).NextU64());
  EXPECT_NE(Rng::Derive(1, {2, 3}).NextU64(), Rng::Derive(1, {3, 2}).NextU64());
  EXPECT_NE(Rng::Derive(1, {2}).NextU64(), Rng::Derive(2, {2}).NextU64());
}

}  // namespace
}  // namespace aiflow
