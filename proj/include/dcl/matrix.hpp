#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace dcl {

// Dense column-major double matrices; vectors are single-column matrices.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Reproducible random stream keyed by (seed, stream id).
///
/// The key words are hashed through std::seed_seq into a 64-bit Mersenne
/// twister, so a trial's stream depends only on its key and never on the
/// order in which trials are executed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);
  RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::mt19937_64& engine() noexcept { return engine_; }

  /// Child stream; children of distinct ids are independent of each other and of the parent.
  RngStream child(std::uint64_t id) const;

 private:
  RngStream(std::uint64_t seed, std::uint64_t stream, const std::vector<std::uint64_t>& key);

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::vector<std::uint64_t> key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Moore-Penrose pseudoinverse via SVD. Singular values below
/// rel_tol * sigma_max are treated as zero; rel_tol == 0 selects
/// max(rows, cols) * machine epsilon. Throws NumericError on failure.
Matrix pinv(const Matrix& m, double rel_tol = 0.0);

/// rows x cols matrix with i.i.d. N(0, 1) entries, filled in column-major order.
Matrix sample_gaussian(Eigen::Index rows, Eigen::Index cols, RngStream& rng);

/// Samples rows ~ N(0, Sigma) with Sigma the symmetric Toeplitz matrix
/// whose first row is [eps^0, eps^1, ..., eps^(p-1)].
class ToeplitzSampler {
 public:
  ToeplitzSampler(Eigen::Index p, double eps);

  Matrix sample(Eigen::Index rows, RngStream& rng) const;
  const Matrix& covariance() const noexcept { return cov_; }
  /// Lower factor with factor * factor^T == covariance (up to eigenvalue clipping).
  const Matrix& factor() const noexcept { return factor_; }
  double eps() const noexcept { return eps_; }

 private:
  double eps_;
  Matrix cov_;
  Matrix factor_;
};

Matrix sample_toeplitz_rows(Eigen::Index rows, Eigen::Index p, double eps, RngStream& rng);

/// ||a - b||_F / max(||b||_F, tiny).
double relative_difference(const Matrix& a, const Matrix& b);

}  // namespace dcl
