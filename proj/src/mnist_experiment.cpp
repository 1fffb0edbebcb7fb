#include "dcl/mnist_experiment.hpp"

#include <algorithm>
#include <string>

#include "dcl/errors.hpp"
#include "dcl/task_gen.hpp"

namespace dcl {

namespace {

constexpr std::uint64_t kFeatures = 1;
constexpr std::uint64_t kTestSplit = 2;
constexpr std::uint64_t kTrainSplit = 3;

Matrix gather(const Matrix& images, const std::vector<std::size_t>& idx) {
  Matrix out(images.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = images.col(static_cast<Eigen::Index>(idx[j]));
  return out;
}

// +1 for odd digits, -1 for even ones
Vector parity_targets(const std::vector<int>& labels, const std::vector<std::size_t>& idx) {
  Vector y(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) y(static_cast<Eigen::Index>(j)) = labels[idx[j]] % 2 ? 1.0 : -1.0;
  return y;
}

// Up to n samples of task `task`, half from each of its two digits when both have enough.
std::vector<std::size_t> draw_balanced(const mnist::ImageSet& set, const std::vector<std::size_t>& pool,
                                       std::size_t n, RngStream& rng) {
  std::array<std::vector<std::size_t>, 2> by_digit;
  for (auto i : pool) by_digit[static_cast<std::size_t>(set.labels[i] % 2)].push_back(i);
  for (auto& d : by_digit) std::shuffle(d.begin(), d.end(), rng.engine());

  std::array<std::size_t, 2> take{n / 2, n - n / 2};
  for (int d = 0; d < 2; ++d) {
    const int o = 1 - d;
    if (by_digit[d].size() < take[d]) {
      take[o] += take[d] - by_digit[d].size();
      take[d] = by_digit[d].size();
    }
  }
  if (take[0] > by_digit[0].size() || take[1] > by_digit[1].size())
    throw ParameterError("mnist: task has fewer than " + std::to_string(n) + " training samples");
  std::vector<std::size_t> out(by_digit[0].begin(), by_digit[0].begin() + static_cast<std::ptrdiff_t>(take[0]));
  out.insert(out.end(), by_digit[1].begin(), by_digit[1].begin() + static_cast<std::ptrdiff_t>(take[1]));
  std::sort(out.begin(), out.end());
  return out;
}

struct TaskModels {
  TaskData odd, even;
  std::vector<Matrix> pinvs;  // shared: the two models see the same regressors
};

}  // namespace

MnistResult run_mnist(const mnist::Dataset& data, const MnistConfig& cfg) {
  if (cfg.K < 1 || cfg.p % cfg.K != 0) throw ParameterError("mnist: K must divide p");
  if (cfg.repetitions < 1 || cfg.T_c < 1 || cfg.n_t < 1) throw ParameterError("mnist: counts must be >= 1");
  if (data.train.images.rows() != static_cast<Eigen::Index>(mnist::kPixels))
    throw DimensionError("mnist: expected 784-pixel images");

  RngStream feature_rng(cfg.seed, {kFeatures});
  const Matrix Z = sample_feature_bank(static_cast<Eigen::Index>(mnist::kPixels), static_cast<Eigen::Index>(cfg.p),
                                       cfg.feature_variance, feature_rng);
  const auto train_pools = mnist::split_by_task(data.train);
  const auto test_pools = mnist::split_by_task(data.test);
  const Partition part = Partition::equal(cfg.p, cfg.K);

  MnistResult res;
  std::array<Matrix, mnist::kTasks> test_features;
  std::array<Vector, mnist::kTasks> test_parity;
  RngStream test_rng(cfg.seed, {kTestSplit});
  for (std::size_t t = 0; t < mnist::kTasks; ++t) {
    auto idx = test_pools[t];
    std::shuffle(idx.begin(), idx.end(), test_rng.engine());
    idx.resize(std::min(idx.size(), cfg.test_per_task));
    if (idx.empty()) throw ParameterError("mnist: no test samples for task " + std::to_string(t));
    std::sort(idx.begin(), idx.end());
    test_features[t] = random_features_batch(gather(data.test.images, idx), Z);
    test_parity[t] = parity_targets(data.test.labels, idx);
    res.test_size[t] = idx.size();
  }

  auto build_tasks = [&](std::size_t rep) {
    RngStream rng(cfg.seed, {kTrainSplit, cfg.reshuffle ? rep : 0});
    std::vector<TaskModels> tasks(mnist::kTasks);
    for (std::size_t t = 0; t < mnist::kTasks; ++t) {
      const auto idx = draw_balanced(data.train, train_pools[t], cfg.n_t, rng);
      auto& m = tasks[t];
      m.odd.t = m.even.t = t + 1;
      m.odd.A = random_features_batch(gather(data.train.images, idx), Z);
      m.odd.y = parity_targets(data.train.labels, idx);
      m.even.A = m.odd.A;
      m.even.y = -m.odd.y;
      m.pinvs = local_pinvs(m.odd.A, part, cfg.exec);
    }
    return tasks;
  };

  CocoaState odd(part), even(part);
  std::vector<TaskModels> tasks;
  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    if (rep == 0 || cfg.reshuffle) tasks = build_tasks(rep);
    for (auto& m : tasks) {
      init_task(odd, m.odd, m.pinvs);
      run_task(odd, m.odd, cfg.T_c, cfg.exec);
      init_task(even, m.even, m.pinvs);
      run_task(even, m.even, cfg.T_c, cfg.exec);
    }
    if (!odd.w_hat.allFinite() || !even.w_hat.allFinite()) throw NumericError("mnist: estimate became non-finite");

    std::array<double, mnist::kTasks> err{};
    for (std::size_t t = 0; t < mnist::kTasks; ++t) {
      const Vector s_odd = test_features[t] * odd.w_hat;
      const Vector s_even = test_features[t] * even.w_hat;
      std::size_t wrong = 0;
      for (Eigen::Index j = 0; j < s_odd.size(); ++j) {
        const bool predict_odd = s_odd(j) > s_even(j);
        if (predict_odd != (test_parity[t](j) > 0)) ++wrong;
      }
      err[t] = static_cast<double>(wrong) / static_cast<double>(s_odd.size());
    }
    res.error_rate.push_back(err);
  }
  return res;
}

}  // namespace dcl
