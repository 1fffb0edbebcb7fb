#include <gtest/gtest.h>

#include "dcl/baseline.hpp"
#include "dcl/errors.hpp"
#include "dcl/metrics.hpp"

using namespace dcl;

namespace {

std::vector<TaskData> draw(const TaskSequenceSpec& spec, std::uint64_t seed) {
  RngStream rng(seed);
  const auto w = generate_parameters(spec, rng);
  return generate_task_data(spec, w, rng);
}

}  // namespace

TEST(OfflineLs, NoiselessSingleTaskRecovered) {
  const auto data = draw(TaskSequenceSpec::uniform(6, 3, 1, 20, 0.0), 1);
  EXPECT_LT((offline_ls(data) - data[0].w_true).norm(), 1e-10);
}

TEST(OfflineLs, MinimumNormInterpolation) {
  const auto data = draw(TaskSequenceSpec::uniform(20, 10, 3, 4, 0.1), 2);
  const Vector w = offline_ls(data);
  EXPECT_LT(stacked_training_error(w, data), 1e-20);
  // min-norm solutions lie in the row space of the stacked matrix
  Matrix A(12, 20);
  for (int t = 0; t < 3; ++t) A.middleRows(4 * t, 4) = data[static_cast<std::size_t>(t)].A;
  const Matrix P = pinv(A) * A;
  EXPECT_LT((P * w - w).norm(), 1e-10);
}

TEST(OfflineLs, GramRouteMatchesDirect) {
  for (std::size_t n : {3, 10, 40}) {
    const auto data = draw(TaskSequenceSpec::uniform(8, 4, 5, n, 0.3), 3 + n);
    const Vector a = offline_ls(data), b = offline_ls_direct(data);
    EXPECT_LT((a - b).norm() / b.norm(), 1e-8) << n;
  }
}

TEST(OfflineLs, NormalEquationsHold) {
  const auto data = draw(TaskSequenceSpec::uniform(5, 2, 4, 10, 0.5), 4);
  const Vector w = offline_ls(data);
  Vector grad = Vector::Zero(5);
  for (const auto& d : data) grad += d.A.transpose() * (d.A * w - d.y);
  EXPECT_LT(grad.norm(), 1e-9);
}

TEST(OfflineLs, NoWorseThanCocoaOnStackedData) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto spec = TaskSequenceSpec::uniform(12, 6, 4, 5 + seed, 0.2);
    RngStream prng(100 + seed);
    const auto w = generate_parameters(spec, prng);
    AlgoConfig cocoa;
    cocoa.K = 3;
    cocoa.T_c = 2;
    AlgoConfig ls;
    ls.method = Method::offline_ls;
    const auto rc = run_trial(spec, w, cocoa, seed, 0);
    const auto rl = run_trial(spec, w, ls, seed, 0);
    RngStream rng = trial_stream(seed, 0);
    const auto data = generate_task_data(spec, w, rng);
    EXPECT_LE(stacked_training_error(rl.estimate, data), stacked_training_error(rc.estimate, data) + 1e-10);
  }
}

TEST(OfflineLs, InterpolationThresholdSpike) {
  AlgoConfig ls;
  ls.method = Method::offline_ls;
  auto err = [&](std::size_t T) {
    return run_monte_carlo(TaskSequenceSpec::uniform(32, 16, T, 1, 0.1), ls, 100, 5).generalization.mean;
  };
  const double e8 = err(8), e32 = err(32), e128 = err(128);
  EXPECT_GT(e32, e8);
  EXPECT_GT(e32, e128);
}

TEST(OfflineLs, RejectsInconsistentTasks) {
  EXPECT_THROW(offline_ls(std::vector<TaskData>{}), ParameterError);
  auto data = draw(TaskSequenceSpec::uniform(6, 3, 2, 4, 0.0), 6);
  data[1].A = Matrix::Zero(4, 5);
  EXPECT_THROW(offline_ls(data), DimensionError);
}
