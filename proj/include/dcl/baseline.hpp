#pragma once

#include <span>

#include "dcl/matrix.hpp"
#include "dcl/task_gen.hpp"

namespace dcl {

/// Minimum-norm least squares over the vertically stacked tasks, [A_1; ...; A_T]^+ [y_1; ...; y_T].
///
/// Tall stacks (N >= 2p) go through the p x p normal matrix, using
/// A^+ = (A^T A)^+ A^T; otherwise the stacked matrix is decomposed directly.
Vector offline_ls(std::span<const TaskData> tasks);

/// Direct SVD of the stacked system regardless of shape.
Vector offline_ls_direct(std::span<const TaskData> tasks);

/// (1 / 2N) sum_t ||A_t w - y_t||^2 over the stacked data.
double stacked_training_error(const Vector& w, std::span<const TaskData> tasks);

}  // namespace dcl
