#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dcl/cocoa.hpp"
#include "dcl/mnist.hpp"

namespace dcl {

struct MnistConfig {
  std::size_t p = 3000;
  std::size_t n_t = 100;
  std::size_t K = 2;
  std::size_t T_c = 1;
  std::size_t repetitions = 100;
  std::size_t test_per_task = 2000;  // capped at what the test files hold
  bool reshuffle = false;            // redraw the training samples every repetition
  double feature_variance = 0.04;
  std::uint64_t seed = 1;
  Exec exec = Exec::parallel;
};

struct MnistResult {
  // error_rate[r][t]: test error of task t after repetition r + 1
  std::vector<std::array<double, mnist::kTasks>> error_rate;
  std::array<std::size_t, mnist::kTasks> test_size{};

  const std::array<double, mnist::kTasks>& final_error() const { return error_rate.back(); }
};

/// Odd/even classification over the five digit-pair tasks with random cosine features.
/// Two models are trained with +-1 targets and combined one-vs-rest.
MnistResult run_mnist(const mnist::Dataset& data, const MnistConfig& cfg);

}  // namespace dcl
