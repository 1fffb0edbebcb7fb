#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dcl/cocoa.hpp"
#include "dcl/matrix.hpp"
#include "dcl/task_gen.hpp"

namespace dcl {

/// (1 / 2n_t) ||A_t w - y_t||^2.
double training_error(const Vector& w_hat, const TaskData& data);

/// Mean training error over the given (seen) tasks.
double forgetting(const Vector& w_hat, std::span<const TaskData> seen);

/// (1/T) sum_t ||w_hat - w_t*||^2 + sigma_t^2, exact under isotropic Gaussian test regressors.
double generalization_exact(const Vector& w_hat, const std::vector<Vector>& w_true, const std::vector<double>& sigma2);

struct McSummary {
  double mean = 0.0;
  double std_error = 0.0;  // sample std (n-1 denominator) / sqrt(count)
  std::size_t trials = 0;
  std::size_t nonfinite = 0;
};

/// Mean and standard error of `values`. Non-finite values are counted; they are
/// dropped from the statistics only when `exclude_nonfinite` is set.
McSummary summarize(std::span<const double> values, bool exclude_nonfinite = false);

/// Sampling estimate of the generalization error from fresh test points (validation only).
McSummary generalization_sampled(const Vector& w_hat, const std::vector<Vector>& w_true,
                                 const std::vector<double>& sigma2, std::size_t samples_per_task, RngStream& rng);

enum class Method { cocoa, offline_ls };

struct AlgoConfig {
  Method method = Method::cocoa;
  std::size_t K = 1;
  std::vector<std::size_t> sizes;  // explicit partition; empty means equal split
  std::size_t T_c = 1;

  Partition partition(std::size_t p) const;
};

struct TrialResult {
  Vector estimate;
  std::vector<double> per_task_training_error;
  double forgetting = 0.0;
  double generalization = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
};

struct McOptions {
  Exec exec = Exec::parallel;
  bool exclude_nonfinite = false;
  // draw fresh task parameters in every trial (expectation over the task model)
  bool resample_parameters = false;
};

struct McResult {
  McSummary generalization;
  McSummary forgetting;
  std::vector<Vector> w_true;
};

/// Stream of the task parameters for experiment seed `seed`.
RngStream parameter_stream(std::uint64_t seed);
/// Stream of the training data of trial `trial`.
RngStream trial_stream(std::uint64_t seed, std::uint64_t trial);

/// One trial: fresh data for tasks 1..T from trial_stream(seed, trial), trained sequentially.
TrialResult run_trial(const TaskSequenceSpec& spec, const std::vector<Vector>& w_true, const AlgoConfig& algo,
                      std::uint64_t seed, std::uint64_t trial, const ToeplitzSampler* toeplitz = nullptr);

/// Independent trials with the parameters held fixed. Results are folded in
/// trial order, so serial and parallel execution give identical summaries.
McResult run_monte_carlo(const TaskSequenceSpec& spec, const std::vector<Vector>& w_true, const AlgoConfig& algo,
                         std::size_t trials, std::uint64_t seed, const McOptions& opts = {});

/// Draws the parameters once from parameter_stream(seed), then runs the trials.
McResult run_monte_carlo(const TaskSequenceSpec& spec, const AlgoConfig& algo, std::size_t trials, std::uint64_t seed,
                         const McOptions& opts = {});

/// Metrics after every CoCoA round while the task sequence is replayed `passes` times.
struct CurvePoint {
  std::size_t pass = 0;  // 1-based
  std::size_t task = 0;  // 1-based
  std::size_t iter = 0;  // 1-based
  McSummary generalization;
  McSummary training;  // mean training error over tasks seen so far
};

std::vector<CurvePoint> learning_curve(const TaskSequenceSpec& spec, const std::vector<Vector>& w_true,
                                       const AlgoConfig& algo, std::size_t passes, std::size_t trials,
                                       std::uint64_t seed, const McOptions& opts = {});

}  // namespace dcl
