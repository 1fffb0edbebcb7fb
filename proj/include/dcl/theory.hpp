#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "dcl/matrix.hpp"

namespace dcl::theory {

// Closed forms report divergence as +infinity; any infinite summand makes the total infinite.
inline constexpr double kDivergent = std::numeric_limits<double>::infinity();
inline bool is_divergent(double v) { return v == kDivergent; }

struct Coeff {
  double r = 0.0;
  double gamma = 0.0;  // kDivergent when p_k lies in [n_t - 1, n_t + 1]
  bool divergent = false;
};

/// r = min(n, p_k) / p_k and gamma = min / (max - min - 1), or divergent.
Coeff coeffs(std::size_t n, std::size_t p_k);

/// Per-task, per-node coefficient tables for a dimension profile.
class TheoryDims {
 public:
  TheoryDims(std::vector<std::size_t> n, std::vector<std::size_t> sizes);
  /// n_t = n for T tasks and p_k = p / K.
  static TheoryDims equal(std::size_t n, std::size_t p, std::size_t K, std::size_t T);

  std::size_t T() const noexcept { return n_.size(); }
  std::size_t K() const noexcept { return sizes_.size(); }
  std::size_t p() const noexcept { return p_; }
  const std::vector<std::size_t>& n() const noexcept { return n_; }
  const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }

  /// t in [0, T]; r(0, k) == K.
  double r(std::size_t t, std::size_t k) const;
  /// t in [1, T].
  double gamma(std::size_t t, std::size_t k) const;
  /// True when some task hits the infinite-gamma branch.
  bool divergent() const noexcept { return divergent_upto(T()); }
  /// Same, restricted to tasks 1..t.
  bool divergent_upto(std::size_t t) const;

  /// Backward recursion h_{tau,k} for tau = 1..t+1 with h_{t+1,k} = 1.
  /// Row index tau (row 0 unused). Requires !divergent_upto(t).
  std::vector<std::vector<double>> h_table(std::size_t t) const;

 private:
  std::vector<std::size_t> n_;
  std::vector<std::size_t> sizes_;
  std::size_t p_ = 0;
  std::vector<std::vector<Coeff>> table_;  // [t-1][k]
};

struct ScalarCoeffs {
  double r = 0.0;
  double gamma = 0.0;
  double h = 0.0;
  double b = 0.0;  // 1 - r/K
  bool divergent = false;
};

/// Equal-dimension coefficients; h = (K^2 + (1-2K) r + (K-1) gamma) / K^2.
ScalarCoeffs h_equal(std::size_t n, std::size_t p, std::size_t K);

/// Which analytical regime the caller is modeling; `overparameterized`
/// additionally requires p_k > n_t + 1 for every trained task.
enum class Regime { overparameterized, one_shot };

/// Per-block Gram matrices of the task parameters: blocks[k](a, b) = <w_a[k], w_b[k]>
/// for a, b in 0..T, with w_0 = 0.
struct BlockGram {
  std::vector<Matrix> blocks;
  std::size_t T() const { return blocks.empty() ? 0 : static_cast<std::size_t>(blocks.front().rows()) - 1; }
};

BlockGram block_gram(const std::vector<Vector>& w, const std::vector<std::size_t>& sizes);

/// Expected Gram under the shared-prefix task model: entries with variance E_w / p,
/// the first p_shared coordinates common to every task.
BlockGram expected_block_gram(std::size_t p, std::size_t p_shared, double e_w, const std::vector<std::size_t>& sizes,
                              std::size_t T);

/// Expected generalization error over all T tasks of the estimate trained on tasks 1..t.
double theorem1_error(const std::vector<Vector>& w, const std::vector<double>& sigma2, const TheoryDims& dims,
                      std::size_t t, Regime regime);
/// Same, from a (possibly expected) block Gram. T = gram.T().
double theorem1_error(const BlockGram& gram, const std::vector<double>& sigma2, const TheoryDims& dims, std::size_t t);

/// Equal dimensions (n_t = n, p_k = p/K), evaluated term by term with powers of h and (1 - r/K).
double corollary_equal_dims(const std::vector<Vector>& w, const std::vector<double>& sigma2, std::size_t n,
                            std::size_t p, std::size_t K, std::size_t t);

/// Single-node continual least squares after T tasks, reported without the +sigma^2 term.
/// Requires p > n + 1, otherwise divergent.
double centralized_error(const std::vector<Vector>& w, double sigma2, std::size_t n, std::size_t p);

/// All tasks share w* and sigma^2; estimate trained on all T = dims.T() tasks.
double theorem2_error(const Vector& w_star, double sigma2, const TheoryDims& dims);

/// Per task: n_t < p_min - (K-1)/(2K-1) p_max - 1 or n_t > p_max + (K-1)/(2K-1) p_min + 1.
std::vector<bool> zero_error_conditions(const TheoryDims& dims);

struct PsiCoeffs {
  double psi0 = 0.0, psi1 = 0.0, psi2 = 0.0, psi3 = 0.0, psi4 = 0.0;
  bool divergent = false;
};

/// Noise/energy weights of the equal-dimension error at t = T. Throws
/// DegenerateParameterError when h == 1, or b == h with K > 1.
PsiCoeffs psi_coeffs(std::size_t n, std::size_t p, std::size_t K, std::size_t T);

/// Error expected over the shared-prefix task model.
double corollary4_error(std::size_t p, std::size_t p_shared, double e_w, double sigma2, std::size_t n, std::size_t K,
                        std::size_t T);

/// T -> infinity limit of corollary4_error; divergent unless |h| < 1.
double limit_error_infT(std::size_t p, std::size_t p_shared, double e_w, double sigma2, std::size_t n, std::size_t K);

/// Monte-Carlo estimates of the Gaussian-matrix expectations feeding the closed forms.
/// Each estimate is divided by its predicted scalar, so every field should approach I.
struct IdentityReport {
  std::size_t n = 0, p_k = 0, trials = 0;
  double r = 0.0, gamma = 0.0;
  Matrix ata;       // E[A^T A] / n
  Matrix apa;       // E[A^+ A] / r
  Matrix aat_pinv;  // E[(A A^T)^+] * n / gamma
  Matrix cross;     // E[B^T (A A^T)^+ B] / gamma, B independent n x p_k

  double max_diag_rel_error() const;
  double max_offdiag_abs() const;
};

IdentityReport gaussian_identity_stats(std::size_t n, std::size_t p_k, std::size_t trials, RngStream& rng);

}  // namespace dcl::theory
