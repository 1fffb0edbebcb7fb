#include <gtest/gtest.h>

#include "dcl/cocoa.hpp"
#include "dcl/errors.hpp"
#include "dcl/matrix.hpp"

using namespace dcl;

namespace {

TaskData random_task(std::size_t n, std::size_t p, double sigma2, RngStream& rng) {
  TaskData d;
  d.t = 1;
  d.A = sample_gaussian(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p), rng);
  d.w_true = sample_gaussian(static_cast<Eigen::Index>(p), 1, rng).col(0);
  d.sigma2 = sigma2;
  d.y = d.A * d.w_true + std::sqrt(sigma2) * sample_gaussian(static_cast<Eigen::Index>(n), 1, rng).col(0);
  return d;
}

}  // namespace

TEST(Partition, EqualAndOffsets) {
  const auto part = Partition::equal(12, 3);
  EXPECT_EQ(part.K(), 3u);
  EXPECT_EQ(part.offset(2), 8u);
  EXPECT_THROW(Partition::equal(10, 3), ParameterError);
  const Partition uneven({2, 5, 1});
  EXPECT_EQ(uneven.p(), 8u);
  EXPECT_EQ(uneven.offsets(), (std::vector<std::size_t>{0, 2, 7}));
  EXPECT_THROW(Partition({3, 0}), ParameterError);
}

TEST(InitTask, ZeroEstimateGivesZeroV) {
  RngStream rng(1);
  CocoaState s(Partition::equal(8, 2));
  init_task(s, random_task(5, 8, 0.1, rng));
  for (const auto& v : s.v) EXPECT_EQ(v, Vector::Zero(5));
  EXPECT_EQ(s.iter_count, 0u);
}

TEST(InitTask, SingleNodeV) {
  RngStream rng(2);
  CocoaState s(Partition::equal(6, 1));
  s.w_hat = sample_gaussian(6, 1, rng).col(0);
  const auto d = random_task(4, 6, 0.1, rng);
  init_task(s, d);
  EXPECT_TRUE(s.v[0].isApprox(d.A * s.w_hat));
}

TEST(InitTask, AveragedVIsPrediction) {
  RngStream rng(3);
  CocoaState s(Partition({3, 4, 5}));
  s.w_hat = sample_gaussian(12, 1, rng).col(0);
  const auto d = random_task(7, 12, 0.1, rng);
  init_task(s, d);
  EXPECT_LT((s.v_bar() - d.A * s.w_hat).norm(), 1e-12 * (1.0 + (d.A * s.w_hat).norm()));
}

TEST(InitTask, DimensionMismatch) {
  RngStream rng(4);
  CocoaState s(Partition::equal(8, 2));
  EXPECT_THROW(init_task(s, random_task(5, 9, 0.1, rng)), DimensionError);
}

TEST(Iterate, RequiresInit) {
  RngStream rng(5);
  CocoaState s(Partition::equal(8, 2));
  EXPECT_THROW(iterate(s, random_task(5, 8, 0.1, rng)), ParameterError);
}

TEST(Iterate, FixedPointWhenResidualIsZero) {
  RngStream rng(6);
  CocoaState s(Partition::equal(10, 2));
  auto d = random_task(4, 10, 0.0, rng);
  s.w_hat = d.w_true;
  init_task(s, d);
  const Vector before = s.w_hat;
  iterate(s, d);
  EXPECT_LT((s.w_hat - before).norm(), 1e-12 * before.norm());
  EXPECT_EQ(s.iter_count, 1u);
}

TEST(Iterate, SingleNodeGivesMinNormSolution) {
  RngStream rng(7);
  CocoaState s(Partition::equal(9, 1));
  const auto d = random_task(4, 9, 0.2, rng);
  init_task(s, d);
  iterate(s, d);
  EXPECT_LT((s.w_hat - pinv(d.A) * d.y).norm(), 1e-12);
}

TEST(Iterate, MatchesClosedForm) {
  RngStream rng(8);
  for (auto sizes : {std::vector<std::size_t>{3, 9, 20}, std::vector<std::size_t>{15, 15}}) {
    const Partition part(sizes);
    const auto d = random_task(10, part.p(), 0.3, rng);
    CocoaState s(part);
    s.w_hat = sample_gaussian(static_cast<Eigen::Index>(part.p()), 1, rng).col(0);
    const Vector prev = s.w_hat;
    init_task(s, d);
    iterate(s, d);
    const Vector closed = one_step_closed_form(prev, d, part);
    EXPECT_LT((s.w_hat - closed).norm() / closed.norm(), 1e-10);
  }
}

TEST(Iterate, SerialAndParallelAgree) {
  RngStream rng(9);
  const Partition part = Partition::equal(32, 4);
  const auto d = random_task(12, 32, 0.1, rng);
  CocoaState a(part), b(part);
  init_task(a, d, Exec::serial);
  init_task(b, d, Exec::parallel);
  run_task(a, d, 5, Exec::serial);
  run_task(b, d, 5, Exec::parallel);
  EXPECT_EQ(a.w_hat, b.w_hat);
}

TEST(RunTask, OneRoundEqualsIterate) {
  RngStream rng(10);
  const auto d = random_task(6, 12, 0.1, rng);
  CocoaState a(Partition::equal(12, 3)), b(Partition::equal(12, 3));
  init_task(a, d);
  init_task(b, d);
  run_task(a, d, 1);
  iterate(b, d);
  EXPECT_EQ(a.w_hat, b.w_hat);
  EXPECT_THROW(run_task(a, d, 0), ParameterError);
}

TEST(RunTask, OverparameterizedBlocksConvergeInOneRound) {
  RngStream rng(11);
  const auto d = random_task(5, 30, 0.1, rng);
  CocoaState s(Partition({10, 8, 12}));
  init_task(s, d);
  iterate(s, d);
  const Vector first = s.w_hat;
  run_task(s, d, 99);
  EXPECT_LE((s.w_hat - first).norm(), 1e-9 * (1.0 + first.norm()));
}

TEST(RunTask, UnderparameterizedSingleNodeReachesLeastSquares) {
  RngStream rng(12);
  const auto d = random_task(40, 6, 0.5, rng);
  CocoaState s(Partition::equal(6, 1));
  s.w_hat = Vector::Ones(6);
  init_task(s, d);
  run_task(s, d, 50);
  const Vector ls = (d.A.transpose() * d.A).ldlt().solve(d.A.transpose() * d.y);
  EXPECT_LT((s.w_hat - ls).norm(), 1e-6);
}

TEST(InitTask, SuppliedPseudoinversesMatchComputed) {
  RngStream rng(13);
  const Partition part = Partition::equal(12, 2);
  const auto d = random_task(5, 12, 0.1, rng);
  CocoaState a(part), b(part);
  init_task(a, d);
  init_task(b, d, local_pinvs(d.A, part));
  iterate(a, d);
  iterate(b, d);
  EXPECT_EQ(a.w_hat, b.w_hat);
  EXPECT_THROW(init_task(b, d, std::vector<Matrix>(1)), DimensionError);
}

TEST(BuildAbar, SingleNodeIsPinv) {
  RngStream rng(14);
  const Matrix A = sample_gaussian(4, 7, rng);
  EXPECT_TRUE(build_abar(A, Partition::equal(7, 1)).isApprox(pinv(A)));
}

TEST(BuildAbar, ShapeAndBlockwiseProduct) {
  RngStream rng(15);
  const Partition part({2, 3, 4});
  const Matrix A = sample_gaussian(5, 9, rng);
  const Vector y = sample_gaussian(5, 1, rng).col(0);
  const Matrix abar = build_abar(A, part);
  EXPECT_EQ(abar.rows(), 9);
  EXPECT_EQ(abar.cols(), 5);
  Vector stacked(9);
  for (std::size_t k = 0; k < 3; ++k)
    part.segment(stacked, k) = pinv(Matrix(part.block(A, k))) * y / 3.0;
  EXPECT_LT((abar * y - stacked).norm(), 1e-12);
}

TEST(OneStep, ExactSolutionIsFixed) {
  RngStream rng(16);
  const auto d = random_task(4, 10, 0.0, rng);
  const Partition part = Partition::equal(10, 2);
  EXPECT_LT((one_step_closed_form(d.w_true, d, part) - d.w_true).norm(), 1e-10);
}

TEST(OneStep, ZeroStartIsAbarY) {
  RngStream rng(17);
  const auto d = random_task(4, 10, 0.3, rng);
  const Partition part = Partition::equal(10, 5);
  EXPECT_LT((one_step_closed_form(Vector::Zero(10), d, part) - build_abar(d.A, part) * d.y).norm(), 1e-12);
}
