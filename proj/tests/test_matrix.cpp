#include <gtest/gtest.h>

#include <cmath>

#include "dcl/errors.hpp"
#include "dcl/matrix.hpp"

using namespace dcl;

TEST(Pinv, Identity) {
  EXPECT_TRUE(pinv(Matrix::Identity(3, 3)).isApprox(Matrix::Identity(3, 3)));
}

TEST(Pinv, RankDeficientDiagonal) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 2.0;
  const Matrix p = pinv(d);
  EXPECT_DOUBLE_EQ(p(0, 0), 0.5);
  EXPECT_EQ(p(1, 1), 0.0);
  EXPECT_EQ(p(0, 1), 0.0);
  EXPECT_EQ(p(1, 0), 0.0);
}

TEST(Pinv, TallGaussianIsLeftInverse) {
  RngStream rng(11);
  const Matrix A = sample_gaussian(8, 3, rng);
  EXPECT_LT((pinv(A) * A - Matrix::Identity(3, 3)).norm(), 1e-10);
}

TEST(Pinv, PenroseConditions) {
  RngStream rng(12);
  for (auto [r, c] : {std::pair{5, 9}, std::pair{9, 5}, std::pair{7, 7}}) {
    const Matrix A = sample_gaussian(r, c, rng);
    const Matrix P = pinv(A);
    EXPECT_LT(relative_difference(A * P * A, A), 1e-8);
    EXPECT_LT(relative_difference(P * A * P, P), 1e-8);
    EXPECT_LT(relative_difference((A * P).transpose(), A * P), 1e-8);
    EXPECT_LT(relative_difference((P * A).transpose(), P * A), 1e-8);
    EXPECT_LT(relative_difference(pinv(P), A), 1e-8);
  }
}

TEST(Pinv, ToleranceDropsSmallSingularValues) {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 1e-3;
  EXPECT_NEAR(pinv(d)(1, 1), 1e3, 1e-6);
  EXPECT_EQ(pinv(d, 1e-2)(1, 1), 0.0);
}

TEST(Pinv, RejectsBadInput) {
  EXPECT_THROW(pinv(Matrix(0, 3)), DimensionError);
  Matrix bad = Matrix::Ones(2, 2);
  bad(0, 1) = std::nan("");
  EXPECT_THROW(pinv(bad), NumericError);
}

TEST(SampleGaussian, Deterministic) {
  RngStream a(7), b(7);
  EXPECT_EQ(sample_gaussian(2, 3, a), sample_gaussian(2, 3, b));
}

TEST(SampleGaussian, Moments) {
  RngStream rng(8);
  const Matrix m = sample_gaussian(1000, 1000, rng);
  const double mean = m.mean();
  const double var = (m.array() - mean).square().sum() / static_cast<double>(m.size() - 1);
  EXPECT_NEAR(mean, 0.0, 0.005);
  EXPECT_NEAR(var, 1.0, 0.01);
}

TEST(RngStream, DistinctStreamsDiffer) {
  RngStream a(5, 0), b(5, 1), c(5, {0});
  const double x = a.normal();
  EXPECT_NE(x, b.normal());
  RngStream a2(5, 0);
  EXPECT_EQ(x, a2.normal());
  (void)c;
}

TEST(RngStream, ChildIsIndependentOfParentPosition) {
  RngStream a(9), b(9);
  b.normal();
  b.normal();
  RngStream ca = a.child(3), cb = b.child(3);
  EXPECT_EQ(ca.normal(), cb.normal());
}

TEST(Toeplitz, ZeroCorrelationMatchesGaussian) {
  RngStream a(21), b(21);
  EXPECT_EQ(sample_toeplitz_rows(4, 5, 0.0, a), sample_gaussian(4, 5, b));
}

TEST(Toeplitz, EmpiricalCovariance) {
  RngStream rng(22);
  const Matrix X = sample_toeplitz_rows(100000, 3, 0.5, rng);
  const Matrix cov = X.transpose() * X / static_cast<double>(X.rows());
  Matrix expect(3, 3);
  expect << 1, .5, .25, .5, 1, .5, .25, .5, 1;
  EXPECT_LT((cov - expect).cwiseAbs().maxCoeff(), 0.02);
}

TEST(Toeplitz, Deterministic) {
  RngStream a(23), b(23);
  EXPECT_EQ(sample_toeplitz_rows(6, 8, 0.9, a), sample_toeplitz_rows(6, 8, 0.9, b));
}

TEST(Toeplitz, RejectsEpsOutOfRange) {
  EXPECT_THROW(ToeplitzSampler(4, 1.0), ParameterError);
  EXPECT_THROW(ToeplitzSampler(4, -0.1), ParameterError);
}

TEST(Toeplitz, FactorReproducesCovarianceNearOne) {
  const ToeplitzSampler s(256, 0.99);
  EXPECT_LT(relative_difference(s.factor() * s.factor().transpose(), s.covariance()), 1e-8);
}
