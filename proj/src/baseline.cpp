#include "dcl/baseline.hpp"

#include "dcl/errors.hpp"

namespace dcl {

namespace {

Eigen::Index check(std::span<const TaskData> tasks, Eigen::Index& rows) {
  if (tasks.empty()) throw ParameterError("offline_ls: need at least one task");
  const Eigen::Index p = tasks.front().A.cols();
  rows = 0;
  for (const auto& t : tasks) {
    if (t.A.cols() != p) throw DimensionError("offline_ls: tasks disagree on p");
    if (t.y.size() != t.A.rows()) throw DimensionError("offline_ls: y length does not match A rows");
    rows += t.A.rows();
  }
  return p;
}

}  // namespace

Vector offline_ls_direct(std::span<const TaskData> tasks) {
  Eigen::Index N = 0;
  const Eigen::Index p = check(tasks, N);
  Matrix A(N, p);
  Vector y(N);
  Eigen::Index row = 0;
  for (const auto& t : tasks) {
    A.middleRows(row, t.A.rows()) = t.A;
    y.segment(row, t.A.rows()) = t.y;
    row += t.A.rows();
  }
  return pinv(A) * y;
}

Vector offline_ls(std::span<const TaskData> tasks) {
  Eigen::Index N = 0;
  const Eigen::Index p = check(tasks, N);
  if (N < 2 * p) return offline_ls_direct(tasks);

  Matrix gram = Matrix::Zero(p, p);
  Vector rhs = Vector::Zero(p);
  for (const auto& t : tasks) {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(t.A.transpose());
    rhs.noalias() += t.A.transpose() * t.y;
  }
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  return pinv(gram) * rhs;
}

double stacked_training_error(const Vector& w, std::span<const TaskData> tasks) {
  double sum = 0.0;
  double n = 0.0;
  for (const auto& t : tasks) {
    sum += (t.A * w - t.y).squaredNorm();
    n += static_cast<double>(t.A.rows());
  }
  return sum / (2.0 * n);
}

}  // namespace dcl
