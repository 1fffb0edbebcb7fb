#include "dcl/task_gen.hpp"

#include <cmath>
#include <string>

#include "dcl/errors.hpp"

namespace dcl {

TaskSequenceSpec TaskSequenceSpec::uniform(std::size_t p, std::size_t p_shared, std::size_t T, std::size_t n,
                                           double sigma2, std::uint64_t seed) {
  TaskSequenceSpec s;
  s.p = p;
  s.p_shared = p_shared;
  s.T = T;
  s.n.assign(T, n);
  s.sigma2.assign(T, sigma2);
  s.seed = seed;
  return s;
}

void TaskSequenceSpec::validate() const {
  if (p < 1) throw ParameterError("task spec: p must be >= 1");
  if (p_shared > p) throw ParameterError("task spec: p_shared must lie in [0, p]");
  if (T < 1) throw ParameterError("task spec: T must be >= 1");
  if (n.size() != T || sigma2.size() != T) throw ParameterError("task spec: n and sigma2 must have length T");
  for (auto nt : n)
    if (nt < 1) throw ParameterError("task spec: every n_t must be >= 1");
  for (auto s : sigma2)
    if (!(s >= 0.0)) throw ParameterError("task spec: every sigma_t^2 must be >= 0");
  if (regressors.kind == RegressorKind::toeplitz && !(regressors.eps >= 0.0 && regressors.eps < 1.0))
    throw ParameterError("task spec: toeplitz eps must lie in [0, 1)");
  if (params.kind == ParamKind::random_energy && !(params.energy >= 0.0))
    throw ParameterError("task spec: E_w must be >= 0");
}

namespace {

Vector gaussian_vector(std::size_t len, double stddev, RngStream& rng) {
  Vector v(static_cast<Eigen::Index>(len));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = stddev * rng.normal();
  return v;
}

// Rescales v so that ||v||^2 == energy. A zero-length v is left alone.
void normalize_to(Vector& v, double energy) {
  if (v.size() == 0) return;
  v *= std::sqrt(energy) / v.norm();
}

}  // namespace

std::vector<Vector> generate_parameters(const TaskSequenceSpec& spec, RngStream& rng) {
  spec.validate();
  const auto p = spec.p;
  const auto ps = spec.p_shared;
  const double p_d = static_cast<double>(p);
  const bool normalized = spec.params.kind == ParamKind::normalized;
  const double stddev = normalized ? 1.0 : std::sqrt(spec.params.energy / p_d);

  Vector head = gaussian_vector(ps, stddev, rng);
  if (normalized) normalize_to(head, static_cast<double>(ps) / p_d);

  std::vector<Vector> out;
  out.reserve(spec.T);
  for (std::size_t t = 0; t < spec.T; ++t) {
    Vector tail = gaussian_vector(p - ps, stddev, rng);
    if (normalized) normalize_to(tail, static_cast<double>(p - ps) / p_d);
    Vector w(static_cast<Eigen::Index>(p));
    w << head, tail;
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<TaskData> generate_task_data(const TaskSequenceSpec& spec, const std::vector<Vector>& w_true,
                                         const ToeplitzSampler* toeplitz, RngStream& rng) {
  spec.validate();
  if (w_true.size() != spec.T) throw DimensionError("generate_task_data: need one parameter vector per task");
  const auto p = static_cast<Eigen::Index>(spec.p);

  std::optional<ToeplitzSampler> owned;
  if (spec.regressors.kind == RegressorKind::toeplitz && toeplitz == nullptr) {
    owned.emplace(p, spec.regressors.eps);
    toeplitz = &*owned;
  }

  std::vector<TaskData> out;
  out.reserve(spec.T);
  for (std::size_t t = 0; t < spec.T; ++t) {
    if (w_true[t].size() != p) throw DimensionError("generate_task_data: parameter vector has wrong length");
    const auto n = static_cast<Eigen::Index>(spec.n[t]);
    TaskData d;
    d.t = t + 1;
    d.A = spec.regressors.kind == RegressorKind::toeplitz ? toeplitz->sample(n, rng) : sample_gaussian(n, p, rng);
    d.w_true = w_true[t];
    d.sigma2 = spec.sigma2[t];
    d.y = d.A * d.w_true;
    if (d.sigma2 > 0.0) {
      const double sd = std::sqrt(d.sigma2);
      for (Eigen::Index i = 0; i < n; ++i) d.y(i) += sd * rng.normal();
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<TaskData> generate_task_data(const TaskSequenceSpec& spec, const std::vector<Vector>& w_true,
                                         RngStream& rng) {
  return generate_task_data(spec, w_true, nullptr, rng);
}

TestPoint sample_test_point(const Vector& w_true, double sigma2, RngStream& rng) {
  if (sigma2 < 0.0) throw ParameterError("sample_test_point: sigma2 must be >= 0");
  TestPoint pt;
  pt.a = Vector(w_true.size());
  for (Eigen::Index i = 0; i < pt.a.size(); ++i) pt.a(i) = rng.normal();
  pt.y = pt.a.dot(w_true);
  if (sigma2 > 0.0) pt.y += std::sqrt(sigma2) * rng.normal();
  return pt;
}

Vector random_features(const Vector& x, const Matrix& Z) {
  if (x.size() != Z.rows())
    throw DimensionError("random_features: x has " + std::to_string(x.size()) + " entries, feature bank expects " +
                         std::to_string(Z.rows()));
  return (Z.transpose() * x).array().cos().matrix();
}

Matrix random_features_batch(const Matrix& X, const Matrix& Z) {
  if (X.rows() != Z.rows()) throw DimensionError("random_features_batch: dimension mismatch");
  return (X.transpose() * Z).array().cos().matrix();
}

Matrix sample_feature_bank(Eigen::Index d, Eigen::Index p, double variance, RngStream& rng) {
  if (variance < 0.0) throw ParameterError("sample_feature_bank: variance must be >= 0");
  return std::sqrt(variance) * sample_gaussian(d, p, rng);
}

}  // namespace dcl
