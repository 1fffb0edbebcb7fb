#include "dcl/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dcl/errors.hpp"

namespace dcl {

namespace {

std::mt19937_64 seeded_engine(const std::vector<std::uint64_t>& key) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * key.size() + 1);
  words.push_back(static_cast<std::uint32_t>(key.size()));
  for (auto k : key) {
    words.push_back(static_cast<std::uint32_t>(k & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : RngStream(seed, stream, {seed, stream}) {}

RngStream::RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
    : seed_(seed), stream_(path.size() ? *(path.end() - 1) : 0) {
  key_.push_back(seed);
  key_.insert(key_.end(), path.begin(), path.end());
  engine_ = seeded_engine(key_);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream, const std::vector<std::uint64_t>& key)
    : seed_(seed), stream_(stream), key_(key), engine_(seeded_engine(key)) {}

RngStream RngStream::child(std::uint64_t id) const {
  auto key = key_;
  key.push_back(id);
  return RngStream(seed_, id, key);
}

Matrix pinv(const Matrix& m, double rel_tol) {
  if (m.size() == 0) throw DimensionError("pinv: empty matrix");
  if (rel_tol < 0.0) throw ParameterError("pinv: rel_tol must be nonnegative");
  if (!m.allFinite()) throw NumericError("pinv: input has non-finite entries");

  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericError("pinv: SVD did not converge");

  const double tol_factor =
      rel_tol > 0.0 ? rel_tol
                    : static_cast<double>(std::max(m.rows(), m.cols())) * std::numeric_limits<double>::epsilon();
  const auto& s = svd.singularValues();
  const double cutoff = tol_factor * (s.size() ? s(0) : 0.0);

  Vector inv_s(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) inv_s(i) = s(i) > cutoff ? 1.0 / s(i) : 0.0;

  Matrix out = svd.matrixV() * inv_s.asDiagonal() * svd.matrixU().transpose();
  if (!out.allFinite()) throw NumericError("pinv: result has non-finite entries");
  return out;
}

Matrix sample_gaussian(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  if (rows < 1 || cols < 1) throw DimensionError("sample_gaussian: rows and cols must be >= 1");
  Matrix out(rows, cols);
  double* data = out.data();
  for (Eigen::Index i = 0; i < out.size(); ++i) data[i] = rng.normal();
  return out;
}

ToeplitzSampler::ToeplitzSampler(Eigen::Index p, double eps) : eps_(eps), cov_(p, p) {
  if (p < 1) throw DimensionError("ToeplitzSampler: p must be >= 1");
  if (!(eps >= 0.0 && eps < 1.0)) throw ParameterError("toeplitz eps must lie in [0, 1), got " + std::to_string(eps));

  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) cov_(i, j) = std::pow(eps, static_cast<double>(std::abs(i - j)));

  Eigen::LLT<Matrix> llt(cov_);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    return;
  }
  // Numerically semidefinite: clip negative eigenvalues.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov_);
  if (eig.info() != Eigen::Success) throw NumericError("ToeplitzSampler: eigendecomposition failed");
  Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  factor_ = eig.eigenvectors() * root.asDiagonal();
}

Matrix ToeplitzSampler::sample(Eigen::Index rows, RngStream& rng) const {
  Matrix g = sample_gaussian(rows, cov_.rows(), rng);
  if (eps_ == 0.0) return g;
  return g * factor_.transpose();
}

Matrix sample_toeplitz_rows(Eigen::Index rows, Eigen::Index p, double eps, RngStream& rng) {
  return ToeplitzSampler(p, eps).sample(rows, rng);
}

double relative_difference(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("relative_difference: shape mismatch");
  return (a - b).norm() / std::max(b.norm(), std::numeric_limits<double>::min());
}

}  // namespace dcl
