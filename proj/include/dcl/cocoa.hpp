#pragma once

#include <cstddef>
#include <vector>

#include "dcl/matrix.hpp"
#include "dcl/task_gen.hpp"

namespace dcl {

/// Execution policy for the data-parallel kernels. `serial` is the
/// reference path kept for testing; `parallel` uses OpenMP.
enum class Exec { serial, parallel };

/// Column split of the p model coordinates across K nodes.
class Partition {
 public:
  explicit Partition(std::vector<std::size_t> sizes);

  /// p_k = p / K for every node. Throws ParameterError if K does not divide p.
  static Partition equal(std::size_t p, std::size_t K);

  std::size_t K() const noexcept { return sizes_.size(); }
  std::size_t p() const noexcept { return p_; }
  std::size_t size(std::size_t k) const { return sizes_.at(k); }
  std::size_t offset(std::size_t k) const { return offsets_.at(k); }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
  const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }

  auto block(const Matrix& A, std::size_t k) const {
    return A.middleCols(static_cast<Eigen::Index>(offsets_[k]), static_cast<Eigen::Index>(sizes_[k]));
  }
  auto segment(Vector& w, std::size_t k) const {
    return w.segment(static_cast<Eigen::Index>(offsets_[k]), static_cast<Eigen::Index>(sizes_[k]));
  }
  auto segment(const Vector& w, std::size_t k) const {
    return w.segment(static_cast<Eigen::Index>(offsets_[k]), static_cast<Eigen::Index>(sizes_[k]));
  }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::size_t p_ = 0;
};

/// Evolving state of the feature-partitioned CoCoA solver over a task stream.
struct CocoaState {
  explicit CocoaState(Partition part);

  Partition partition;
  Vector w_hat;           // stacked estimate, carried from task to task
  std::vector<Vector> v;  // per-node contribution to the prediction of y_t, each n_t
  std::size_t task_index = 0;
  std::size_t iter_count = 0;
  std::vector<Matrix> node_pinv;  // A_{t,[k]}^+ for the active task

  /// (1/K) sum_k v_k.
  Vector v_bar() const;
};

/// Starts task `data`: keeps w_hat, sets v_k = K A_{t,[k]} w_hat_k and caches the local pseudoinverses.
void init_task(CocoaState& state, const TaskData& data, Exec exec = Exec::parallel);

/// Same, with the local pseudoinverses supplied (e.g. reused across repeated passes over a task).
void init_task(CocoaState& state, const TaskData& data, std::vector<Matrix> node_pinv);

/// A_{[k]}^+ for every node.
std::vector<Matrix> local_pinvs(const Matrix& A, const Partition& part, Exec exec = Exec::parallel);

/// One CoCoA round: every node solves its local subproblem against the averaged v, then updates.
void iterate(CocoaState& state, const TaskData& data, Exec exec = Exec::parallel);

/// T_c rounds of `iterate` on the current task.
void run_task(CocoaState& state, const TaskData& data, std::size_t T_c, Exec exec = Exec::parallel);

/// (1/K) [A_{[1]}^+; ...; A_{[K]}^+], p x n_t.
Matrix build_abar(const Matrix& A, const Partition& part);

/// P_t w_prev + Abar_t y_t with P_t = I - Abar_t A_t.
Vector one_step_closed_form(const Vector& w_prev, const TaskData& data, const Partition& part);

}  // namespace dcl
