#include "dcl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "dcl/baseline.hpp"
#include "dcl/errors.hpp"
#include "error_slot.hpp"

namespace dcl {

namespace {

using detail::ErrorSlot;

constexpr std::uint64_t kParamStream = 0x7061'7261'6d73ULL;  // "params"
constexpr std::uint64_t kDataStream = 0x6461'7461ULL;        // "data"


}  // namespace

double training_error(const Vector& w_hat, const TaskData& data) {
  if (w_hat.size() != data.A.cols() || data.y.size() != data.A.rows())
    throw DimensionError("training_error: dimension mismatch");
  return (data.A * w_hat - data.y).squaredNorm() / (2.0 * static_cast<double>(data.A.rows()));
}

double forgetting(const Vector& w_hat, std::span<const TaskData> seen) {
  if (seen.empty()) throw ParameterError("forgetting: no tasks seen");
  double sum = 0.0;
  for (const auto& d : seen) sum += training_error(w_hat, d);
  return sum / static_cast<double>(seen.size());
}

double generalization_exact(const Vector& w_hat, const std::vector<Vector>& w_true,
                            const std::vector<double>& sigma2) {
  if (w_true.empty() || w_true.size() != sigma2.size())
    throw DimensionError("generalization_exact: need matching, nonempty parameter and noise lists");
  double sum = 0.0;
  for (std::size_t t = 0; t < w_true.size(); ++t) {
    if (w_true[t].size() != w_hat.size()) throw DimensionError("generalization_exact: parameter length mismatch");
    sum += (w_hat - w_true[t]).squaredNorm() + sigma2[t];
  }
  return sum / static_cast<double>(w_true.size());
}

McSummary summarize(std::span<const double> values, bool exclude_nonfinite) {
  McSummary s;
  for (double v : values)
    if (!std::isfinite(v)) ++s.nonfinite;

  std::size_t count = 0;
  double sum = 0.0;
  for (double v : values) {
    if (exclude_nonfinite && !std::isfinite(v)) continue;
    sum += v;
    ++count;
  }
  s.trials = count;
  if (count == 0) {
    s.mean = std::nan("");
    s.std_error = std::nan("");
    return s;
  }
  s.mean = sum / static_cast<double>(count);
  if (count > 1) {
    double ss = 0.0;
    for (double v : values) {
      if (exclude_nonfinite && !std::isfinite(v)) continue;
      ss += (v - s.mean) * (v - s.mean);
    }
    s.std_error = std::sqrt(ss / static_cast<double>(count - 1) / static_cast<double>(count));
  }
  return s;
}

McSummary generalization_sampled(const Vector& w_hat, const std::vector<Vector>& w_true,
                                 const std::vector<double>& sigma2, std::size_t samples_per_task, RngStream& rng) {
  if (w_true.empty() || w_true.size() != sigma2.size()) throw DimensionError("generalization_sampled: list mismatch");
  if (samples_per_task < 1) throw ParameterError("generalization_sampled: need at least one sample");
  // Each draw averages one test point per task, so the draws are i.i.d. estimates of g_T.
  std::vector<double> draws(samples_per_task, 0.0);
  for (auto& d : draws) {
    for (std::size_t t = 0; t < w_true.size(); ++t) {
      const TestPoint pt = sample_test_point(w_true[t], sigma2[t], rng);
      const double e = pt.a.dot(w_hat) - pt.y;
      d += e * e;
    }
    d /= static_cast<double>(w_true.size());
  }
  return summarize(draws);
}

Partition AlgoConfig::partition(std::size_t p) const {
  if (!sizes.empty()) {
    Partition part(sizes);
    if (part.p() != p) throw ParameterError("algo config: partition sizes do not sum to p");
    return part;
  }
  return Partition::equal(p, K);
}

RngStream parameter_stream(std::uint64_t seed) { return RngStream(seed, {kParamStream}); }

RngStream trial_stream(std::uint64_t seed, std::uint64_t trial) { return RngStream(seed, {kDataStream, trial}); }

TrialResult run_trial(const TaskSequenceSpec& spec, const std::vector<Vector>& w_true, const AlgoConfig& algo,
                      std::uint64_t seed, std::uint64_t trial, const ToeplitzSampler* toeplitz) {
  RngStream rng = trial_stream(seed, trial);
  const auto data = generate_task_data(spec, w_true, toeplitz, rng);

  TrialResult res;
  res.seed = seed;
  res.trial = trial;
  if (algo.method == Method::offline_ls) {
    res.estimate = offline_ls(data);
  } else {
    CocoaState state(algo.partition(spec.p));
    for (const auto& d : data) {
      init_task(state, d, Exec::serial);
      run_task(state, d, algo.T_c, Exec::serial);
    }
    res.estimate = std::move(state.w_hat);
  }

  res.per_task_training_error.reserve(data.size());
  for (const auto& d : data) res.per_task_training_error.push_back(training_error(res.estimate, d));
  res.forgetting = 0.0;
  for (double e : res.per_task_training_error) res.forgetting += e;
  res.forgetting /= static_cast<double>(data.size());
  res.generalization = generalization_exact(res.estimate, w_true, spec.sigma2);
  return res;
}

McResult run_monte_carlo(const TaskSequenceSpec& spec, const std::vector<Vector>& w_true, const AlgoConfig& algo,
                         std::size_t trials, std::uint64_t seed, const McOptions& opts) {
  if (trials < 1) throw ParameterError("run_monte_carlo: trials must be >= 1");
  spec.validate();
  std::optional<ToeplitzSampler> toeplitz;
  if (spec.regressors.kind == RegressorKind::toeplitz)
    toeplitz.emplace(static_cast<Eigen::Index>(spec.p), spec.regressors.eps);
  const ToeplitzSampler* tz = toeplitz ? &*toeplitz : nullptr;

  std::vector<double> gen(trials), fgt(trials);
  ErrorSlot errors;
  const auto n = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(dynamic) if (opts.exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    gen[idx] = fgt[idx] = std::numeric_limits<double>::infinity();
    try {
      std::vector<Vector> drawn;
      if (opts.resample_parameters) {
        RngStream prng(seed, {kParamStream, static_cast<std::uint64_t>(idx)});
        drawn = generate_parameters(spec, prng);
      }
      const TrialResult r = run_trial(spec, opts.resample_parameters ? drawn : w_true, algo, seed, idx, tz);
      // a diverged local solve shows up as a non-finite estimate
      if (r.estimate.allFinite()) {
        gen[idx] = r.generalization;
        fgt[idx] = r.forgetting;
      }
    } catch (const NumericError&) {
      // recorded as a non-finite trial
    } catch (...) {
      errors.capture();
    }
  }
  errors.rethrow();

  McResult out;
  out.generalization = summarize(gen, opts.exclude_nonfinite);
  out.forgetting = summarize(fgt, opts.exclude_nonfinite);
  out.w_true = w_true;
  return out;
}

McResult run_monte_carlo(const TaskSequenceSpec& spec, const AlgoConfig& algo, std::size_t trials, std::uint64_t seed,
                         const McOptions& opts) {
  RngStream prng = parameter_stream(seed);
  const auto w_true = generate_parameters(spec, prng);
  return run_monte_carlo(spec, w_true, algo, trials, seed, opts);
}

std::vector<CurvePoint> learning_curve(const TaskSequenceSpec& spec, const std::vector<Vector>& w_true,
                                       const AlgoConfig& algo, std::size_t passes, std::size_t trials,
                                       std::uint64_t seed, const McOptions& opts) {
  if (passes < 1 || trials < 1) throw ParameterError("learning_curve: passes and trials must be >= 1");
  if (algo.method != Method::cocoa) throw ParameterError("learning_curve: only defined for CoCoA");
  spec.validate();
  const std::size_t T = spec.T;
  const std::size_t points = passes * T * algo.T_c;

  std::vector<std::vector<double>> gen(trials, std::vector<double>(points));
  std::vector<std::vector<double>> trn(trials, std::vector<double>(points));
  ErrorSlot errors;
  const auto n = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(dynamic) if (opts.exec == Exec::parallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    std::fill(gen[idx].begin(), gen[idx].end(), std::numeric_limits<double>::infinity());
    std::fill(trn[idx].begin(), trn[idx].end(), std::numeric_limits<double>::infinity());
    try {
      RngStream rng = trial_stream(seed, idx);
      const auto data = generate_task_data(spec, w_true, rng);
      CocoaState state(algo.partition(spec.p));
      std::size_t point = 0;
      for (std::size_t pass = 0; pass < passes; ++pass) {
        for (std::size_t t = 0; t < T; ++t) {
          init_task(state, data[t], Exec::serial);
          const std::size_t seen = pass == 0 ? t + 1 : T;
          for (std::size_t it = 0; it < algo.T_c; ++it, ++point) {
            iterate(state, data[t], Exec::serial);
            gen[idx][point] = generalization_exact(state.w_hat, w_true, spec.sigma2);
            trn[idx][point] = forgetting(state.w_hat, std::span(data).first(seen));
          }
        }
      }
    } catch (const NumericError&) {
    } catch (...) {
      errors.capture();
    }
  }
  errors.rethrow();

  std::vector<CurvePoint> out;
  out.reserve(points);
  std::vector<double> col_g(trials), col_t(trials);
  std::size_t point = 0;
  for (std::size_t pass = 1; pass <= passes; ++pass)
    for (std::size_t t = 1; t <= T; ++t)
      for (std::size_t it = 1; it <= algo.T_c; ++it, ++point) {
        for (std::size_t s = 0; s < trials; ++s) {
          col_g[s] = gen[s][point];
          col_t[s] = trn[s][point];
        }
        out.push_back({pass, t, it, summarize(col_g, opts.exclude_nonfinite), summarize(col_t, opts.exclude_nonfinite)});
      }
  return out;
}

}  // namespace dcl
