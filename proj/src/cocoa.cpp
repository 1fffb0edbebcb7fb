#include "dcl/cocoa.hpp"

#include <numeric>
#include <string>

#include "dcl/errors.hpp"
#include "error_slot.hpp"

namespace dcl {

Partition::Partition(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw ParameterError("partition: need at least one node");
  offsets_.reserve(sizes_.size());
  for (auto s : sizes_) {
    if (s < 1) throw ParameterError("partition: every block needs at least one column");
    offsets_.push_back(p_);
    p_ += s;
  }
}

Partition Partition::equal(std::size_t p, std::size_t K) {
  if (K < 1 || p % K != 0)
    throw ParameterError("partition: K = " + std::to_string(K) + " does not divide p = " + std::to_string(p));
  return Partition(std::vector<std::size_t>(K, p / K));
}

CocoaState::CocoaState(Partition part) : partition(std::move(part)) {
  w_hat = Vector::Zero(static_cast<Eigen::Index>(partition.p()));
}

Vector CocoaState::v_bar() const {
  Vector out = Vector::Zero(v.empty() ? 0 : v.front().size());
  for (const auto& vk : v) out += vk;
  return out / static_cast<double>(partition.K());
}

namespace {

void check_dims(const CocoaState& state, const TaskData& data) {
  if (data.A.cols() != static_cast<Eigen::Index>(state.partition.p()))
    throw DimensionError("cocoa: task has " + std::to_string(data.A.cols()) + " columns, partition expects " +
                         std::to_string(state.partition.p()));
  if (data.y.size() != data.A.rows()) throw DimensionError("cocoa: y length does not match A rows");
}

}  // namespace

std::vector<Matrix> local_pinvs(const Matrix& A, const Partition& part, Exec exec) {
  if (A.cols() != static_cast<Eigen::Index>(part.p())) throw DimensionError("local_pinvs: column count mismatch");
  const auto K = static_cast<std::ptrdiff_t>(part.K());
  std::vector<Matrix> out(part.K());
  detail::ErrorSlot errors;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel && K > 1)
  for (std::ptrdiff_t k = 0; k < K; ++k) {
    try {
      out[static_cast<std::size_t>(k)] = pinv(part.block(A, static_cast<std::size_t>(k)));
    } catch (...) {
      errors.capture();
    }
  }
  errors.rethrow();
  return out;
}

void init_task(CocoaState& state, const TaskData& data, Exec exec) {
  check_dims(state, data);
  init_task(state, data, local_pinvs(data.A, state.partition, exec));
}

void init_task(CocoaState& state, const TaskData& data, std::vector<Matrix> node_pinv) {
  check_dims(state, data);
  const auto& part = state.partition;
  if (node_pinv.size() != part.K()) throw DimensionError("init_task: need one pseudoinverse per node");
  for (std::size_t k = 0; k < part.K(); ++k)
    if (node_pinv[k].rows() != static_cast<Eigen::Index>(part.size(k)) || node_pinv[k].cols() != data.A.rows())
      throw DimensionError("init_task: pseudoinverse shape does not match block " + std::to_string(k));
  const double Kd = static_cast<double>(part.K());
  state.v.assign(part.K(), Vector());
  for (std::size_t k = 0; k < part.K(); ++k) state.v[k] = Kd * (part.block(data.A, k) * part.segment(state.w_hat, k));
  state.node_pinv = std::move(node_pinv);
  state.iter_count = 0;
  state.task_index = data.t;
}

void iterate(CocoaState& state, const TaskData& data, Exec exec) {
  check_dims(state, data);
  const auto& part = state.partition;
  if (state.node_pinv.size() != part.K() || state.v.size() != part.K())
    throw ParameterError("cocoa: iterate called before init_task");
  const auto K = static_cast<std::ptrdiff_t>(part.K());
  const double Kd = static_cast<double>(K);

  // Central aggregation; barrier between rounds.
  const Vector v_bar = state.v_bar();
  const Vector residual = data.y - v_bar;

#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel && K > 1)
  for (std::ptrdiff_t k = 0; k < K; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const Vector delta = state.node_pinv[ku] * residual / Kd;
    part.segment(state.w_hat, ku) += delta;
    state.v[ku] = v_bar + Kd * (part.block(data.A, ku) * delta);
  }
  ++state.iter_count;
}

void run_task(CocoaState& state, const TaskData& data, std::size_t T_c, Exec exec) {
  if (T_c < 1) throw ParameterError("run_task: T_c must be >= 1");
  for (std::size_t i = 0; i < T_c; ++i) iterate(state, data, exec);
}

Matrix build_abar(const Matrix& A, const Partition& part) {
  if (A.cols() != static_cast<Eigen::Index>(part.p())) throw DimensionError("build_abar: column count mismatch");
  Matrix out(A.cols(), A.rows());
  const double Kd = static_cast<double>(part.K());
  for (std::size_t k = 0; k < part.K(); ++k)
    out.middleRows(static_cast<Eigen::Index>(part.offset(k)), static_cast<Eigen::Index>(part.size(k))) =
        pinv(part.block(A, k)) / Kd;
  return out;
}

Vector one_step_closed_form(const Vector& w_prev, const TaskData& data, const Partition& part) {
  if (w_prev.size() != static_cast<Eigen::Index>(part.p())) throw DimensionError("one_step_closed_form: w_prev length");
  if (data.y.size() != data.A.rows()) throw DimensionError("one_step_closed_form: y length");
  const Matrix abar = build_abar(data.A, part);
  const Matrix P = Matrix::Identity(w_prev.size(), w_prev.size()) - abar * data.A;
  return P * w_prev + abar * data.y;
}

}  // namespace dcl
