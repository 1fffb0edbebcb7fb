#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dcl/matrix.hpp"

namespace dcl {

enum class RegressorKind { iid_gaussian, toeplitz };
enum class ParamKind {
  normalized,     // ||shared head||^2 = p_S/p, ||task tail||^2 = (p-p_S)/p
  random_energy,  // entries i.i.d. N(0, E_w/p)
};

struct RegressorModel {
  RegressorKind kind = RegressorKind::iid_gaussian;
  double eps = 0.0;  // toeplitz correlation, in [0, 1)

  static RegressorModel iid() { return {}; }
  static RegressorModel toeplitz(double eps) { return {RegressorKind::toeplitz, eps}; }
};

struct ParamModel {
  ParamKind kind = ParamKind::normalized;
  double energy = 1.0;  // E_w, only used by random_energy

  static ParamModel normalized() { return {}; }
  static ParamModel random_energy(double e_w) { return {ParamKind::random_energy, e_w}; }
};

/// Full description of a synthetic continual-learning task stream.
struct TaskSequenceSpec {
  std::size_t p = 0;
  std::size_t p_shared = 0;
  std::size_t T = 1;
  std::vector<std::size_t> n;  // per-task sample counts
  std::vector<double> sigma2;  // per-task noise variances
  RegressorModel regressors;
  ParamModel params;
  std::uint64_t seed = 0;

  /// Equal n and sigma2 for every task.
  static TaskSequenceSpec uniform(std::size_t p, std::size_t p_shared, std::size_t T, std::size_t n, double sigma2,
                                  std::uint64_t seed = 0);

  /// Throws ParameterError when the invariants do not hold.
  void validate() const;
};

struct TaskData {
  std::size_t t = 0;  // 1-based task index
  Matrix A;           // n_t x p
  Vector y;           // n_t
  Vector w_true;      // p
  double sigma2 = 0.0;
};

/// One w_t* per task. The first p_shared entries are identical across tasks.
std::vector<Vector> generate_parameters(const TaskSequenceSpec& spec, RngStream& rng);

/// Draws A_t per the regressor model and y_t = A_t w_t* + z_t, z_t ~ N(0, sigma_t^2 I).
std::vector<TaskData> generate_task_data(const TaskSequenceSpec& spec, const std::vector<Vector>& w_true,
                                         RngStream& rng);

/// Same as generate_task_data but reuses a prebuilt Toeplitz factor.
std::vector<TaskData> generate_task_data(const TaskSequenceSpec& spec, const std::vector<Vector>& w_true,
                                         const ToeplitzSampler* toeplitz, RngStream& rng);

struct TestPoint {
  Vector a;
  double y = 0.0;
};

TestPoint sample_test_point(const Vector& w_true, double sigma2, RngStream& rng);

/// Random Fourier-type features: a_l = cos(zeta_l^T x) for the columns zeta_l of Z (d x p).
Vector random_features(const Vector& x, const Matrix& Z);
/// Row j of the result is random_features(X.col(j), Z)^T.
Matrix random_features_batch(const Matrix& X, const Matrix& Z);
/// d x p bank with i.i.d. N(0, variance) entries.
Matrix sample_feature_bank(Eigen::Index d, Eigen::Index p, double variance, RngStream& rng);

}  // namespace dcl
