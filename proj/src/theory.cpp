#include "dcl/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dcl/errors.hpp"

namespace dcl::theory {

Coeff coeffs(std::size_t n, std::size_t p_k) {
  if (n < 1 || p_k < 1) throw ParameterError("coeffs: n and p_k must be >= 1");
  const double lo = static_cast<double>(std::min(n, p_k));
  const double hi = static_cast<double>(std::max(n, p_k));
  Coeff c;
  c.r = lo / static_cast<double>(p_k);
  // p_k in [n - 1, n + 1]  <=>  |p_k - n| <= 1
  if (hi - lo <= 1.0) {
    c.gamma = kDivergent;
    c.divergent = true;
  } else {
    c.gamma = lo / (hi - lo - 1.0);
  }
  return c;
}

TheoryDims::TheoryDims(std::vector<std::size_t> n, std::vector<std::size_t> sizes)
    : n_(std::move(n)), sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw ParameterError("TheoryDims: need at least one node");
  for (auto s : sizes_) {
    if (s < 1) throw ParameterError("TheoryDims: every p_k must be >= 1");
    p_ += s;
  }
  table_.reserve(n_.size());
  for (auto nt : n_) {
    std::vector<Coeff> row;
    row.reserve(sizes_.size());
    for (auto pk : sizes_) row.push_back(coeffs(nt, pk));
    table_.push_back(std::move(row));
  }
}

TheoryDims TheoryDims::equal(std::size_t n, std::size_t p, std::size_t K, std::size_t T) {
  if (K < 1 || p % K != 0) throw ParameterError("TheoryDims::equal: K must divide p");
  return TheoryDims(std::vector<std::size_t>(T, n), std::vector<std::size_t>(K, p / K));
}

double TheoryDims::r(std::size_t t, std::size_t k) const {
  if (t == 0) return static_cast<double>(K());
  return table_.at(t - 1).at(k).r;
}

double TheoryDims::gamma(std::size_t t, std::size_t k) const { return table_.at(t - 1).at(k).gamma; }

bool TheoryDims::divergent_upto(std::size_t t) const {
  for (std::size_t tau = 0; tau < std::min(t, T()); ++tau)
    for (const auto& c : table_[tau])
      if (c.divergent) return true;
  return false;
}

std::vector<std::vector<double>> TheoryDims::h_table(std::size_t t) const {
  if (t > T()) throw ParameterError("h_table: t exceeds the number of tasks");
  if (divergent_upto(t)) throw ParameterError("h_table: coefficients are divergent");
  const std::size_t K = this->K();
  const double K2 = static_cast<double>(K * K);
  std::vector<std::vector<double>> h(t + 2, std::vector<double>(K, 0.0));
  h[t + 1].assign(K, 1.0);
  for (std::size_t tau = t; tau >= 1; --tau) {
    double weighted = 0.0;  // sum_i h_{tau+1,i} gamma_{tau,i}
    for (std::size_t i = 0; i < K; ++i) weighted += h[tau + 1][i] * gamma(tau, i);
    for (std::size_t k = 0; k < K; ++k) {
      const double others = weighted - h[tau + 1][k] * gamma(tau, k);
      h[tau][k] = (h[tau + 1][k] * (K2 + r(tau, k) * (1.0 - 2.0 * static_cast<double>(K))) + others) / K2;
    }
  }
  return h;
}

ScalarCoeffs h_equal(std::size_t n, std::size_t p, std::size_t K) {
  if (K < 1 || p % K != 0) throw ParameterError("h_equal: K must divide p");
  const Coeff c = coeffs(n, p / K);
  const double Kd = static_cast<double>(K);
  ScalarCoeffs s;
  s.r = c.r;
  s.gamma = c.gamma;
  s.b = 1.0 - c.r / Kd;
  s.divergent = c.divergent;
  s.h = c.divergent ? kDivergent : (Kd * Kd + (1.0 - 2.0 * Kd) * c.r + (Kd - 1.0) * c.gamma) / (Kd * Kd);
  return s;
}

BlockGram block_gram(const std::vector<Vector>& w, const std::vector<std::size_t>& sizes) {
  const auto T = w.size();
  const auto p = std::accumulate(sizes.begin(), sizes.end(), std::size_t{0});
  BlockGram g;
  std::size_t off = 0;
  for (auto pk : sizes) {
    Matrix stack = Matrix::Zero(static_cast<Eigen::Index>(pk), static_cast<Eigen::Index>(T + 1));
    for (std::size_t a = 0; a < T; ++a) {
      if (w[a].size() != static_cast<Eigen::Index>(p)) throw DimensionError("block_gram: parameter length mismatch");
      stack.col(static_cast<Eigen::Index>(a + 1)) =
          w[a].segment(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(pk));
    }
    g.blocks.push_back(stack.transpose() * stack);
    off += pk;
  }
  return g;
}

BlockGram expected_block_gram(std::size_t p, std::size_t p_shared, double e_w, const std::vector<std::size_t>& sizes,
                              std::size_t T) {
  if (p_shared > p) throw ParameterError("expected_block_gram: p_shared > p");
  const double var = e_w / static_cast<double>(p);
  BlockGram g;
  std::size_t off = 0;
  for (auto pk : sizes) {
    // coordinates [off, off + pk) split into shared [0, p_shared) and task-specific ones
    const std::size_t shared = off >= p_shared ? 0 : std::min(pk, p_shared - off);
    const std::size_t own = pk - shared;
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(T + 1), static_cast<Eigen::Index>(T + 1));
    for (std::size_t a = 1; a <= T; ++a)
      for (std::size_t b = 1; b <= T; ++b)
        m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            var * static_cast<double>(shared + (a == b ? own : 0));
    g.blocks.push_back(std::move(m));
    off += pk;
  }
  if (off != p) throw DimensionError("expected_block_gram: block sizes do not sum to p");
  return g;
}

double theorem1_error(const BlockGram& gram, const std::vector<double>& sigma2, const TheoryDims& dims,
                      std::size_t t) {
  const std::size_t T = gram.T();
  const std::size_t K = dims.K();
  if (T < 1) throw ParameterError("theorem1_error: need at least one task parameter");
  if (sigma2.size() != T) throw DimensionError("theorem1_error: need one noise variance per task");
  if (gram.blocks.size() != K) throw DimensionError("theorem1_error: gram blocks do not match node count");
  if (t > dims.T()) throw ParameterError("theorem1_error: t exceeds the tasks described by dims");
  if (t > T) throw ParameterError("theorem1_error: t exceeds T");
  if (dims.divergent_upto(t)) return kDivergent;

  const auto h = dims.h_table(t);
  const double Kd = static_cast<double>(K);
  const double K2 = Kd * Kd;
  const auto G = [&](std::size_t k, std::size_t a, std::size_t b) {
    return gram.blocks[k](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  };
  // <w_x - w_i, w_y - w_i> on block k
  const auto ip = [&](std::size_t k, std::size_t x, std::size_t y, std::size_t i) {
    return G(k, x, y) - G(k, x, i) - G(k, i, y) + G(k, i, i);
  };

  double total = 0.0;
  for (std::size_t i = 1; i <= T; ++i) {
    for (std::size_t k = 0; k < K; ++k) total += h[1][k] * G(k, i, i);
    total += sigma2[i - 1];
  }

  std::vector<double> R(K), S(K), run(K);
  for (std::size_t tau = 1; tau <= t; ++tau) {
    double weighted = 0.0;
    for (std::size_t k = 0; k < K; ++k) weighted += h[tau + 1][k] * dims.gamma(tau, k);
    for (std::size_t k = 0; k < K; ++k) {
      const double others = weighted - h[tau + 1][k] * dims.gamma(tau, k);
      R[k] = (h[tau + 1][k] * dims.r(tau, k) + others) / K2;
      S[k] = (h[tau + 1][k] * dims.r(tau, k) * (Kd - 1.0) - others) / K2;
    }
    // Noise enters once per i, then is averaged over T.
    total += static_cast<double>(T) * sigma2[tau - 1] * weighted / K2;

    for (std::size_t i = 1; i <= T; ++i) {
      for (std::size_t k = 0; k < K; ++k) total += R[k] * ip(k, tau, tau, i);
      // j runs down from tau-1 to 0, extending prod_{l=j+1}^{tau-1} (1 - r_{l,k}/K) one factor at a time.
      std::fill(run.begin(), run.end(), 1.0);
      for (std::size_t j = tau; j-- > 0;) {
        for (std::size_t k = 0; k < K; ++k) {
          const double q = dims.r(j, k) / Kd * run[k] * S[k];
          total += 2.0 * q * ip(k, tau, j, i);
          run[k] *= 1.0 - dims.r(j, k) / Kd;
        }
      }
    }
  }
  return total / static_cast<double>(T);
}

double theorem1_error(const std::vector<Vector>& w, const std::vector<double>& sigma2, const TheoryDims& dims,
                      std::size_t t, Regime regime) {
  if (regime == Regime::overparameterized) {
    for (std::size_t tau = 0; tau < std::min(t, dims.T()); ++tau)
      for (auto pk : dims.sizes())
        if (!(pk > dims.n()[tau] + 1))
          throw ParameterError("theorem1_error: overparameterized regime requires p_k > n_t + 1 (task " +
                               std::to_string(tau + 1) + ")");
  }
  return theorem1_error(block_gram(w, dims.sizes()), sigma2, dims, t);
}

double corollary_equal_dims(const std::vector<Vector>& w, const std::vector<double>& sigma2, std::size_t n,
                            std::size_t p, std::size_t K, std::size_t t) {
  const std::size_t T = w.size();
  if (T < 1 || sigma2.size() != T) throw DimensionError("corollary_equal_dims: need T parameters and T variances");
  if (t > T) throw ParameterError("corollary_equal_dims: t exceeds T");
  const ScalarCoeffs c = h_equal(n, p, K);
  if (t == 0) {
    double total = 0.0;
    for (std::size_t i = 0; i < T; ++i) total += w[i].squaredNorm() + sigma2[i];
    return total / static_cast<double>(T);
  }
  if (c.divergent) return kDivergent;

  const double Kd = static_cast<double>(K);
  const double K2 = Kd * Kd;
  const double r = c.r, g = c.gamma, h = c.h, b = c.b;
  const double cross = (r - g) * (Kd - 1.0) / K2;

  double total = 0.0;
  for (std::size_t i = 0; i < T; ++i) {
    double term = w[i].squaredNorm() * std::pow(h, static_cast<double>(t)) + sigma2[i];
    for (std::size_t tau = 1; tau <= t; ++tau) {
      const double ht = std::pow(h, static_cast<double>(t - tau));
      const Vector d_tau = w[tau - 1] - w[i];
      term += d_tau.squaredNorm() * (r + (Kd - 1.0) * g) / K2 * ht;
      term += sigma2[tau - 1] * g / Kd * ht;
      double inner = 0.0;
      for (std::size_t j = 1; j < tau; ++j)
        inner += std::pow(b, static_cast<double>(tau - j - 1)) * d_tau.dot(w[j - 1] - w[i]);
      term += 2.0 * ht * cross * (r / Kd) * inner;
      term -= 2.0 * cross * std::pow(b, static_cast<double>(tau - 1)) * ht * d_tau.dot(w[i]);
    }
    total += term;
  }
  return total / static_cast<double>(T);
}

double centralized_error(const std::vector<Vector>& w, double sigma2, std::size_t n, std::size_t p) {
  const std::size_t T = w.size();
  if (T < 1) throw DimensionError("centralized_error: need at least one task");
  if (!(p > n + 1)) return kDivergent;
  const double r = static_cast<double>(n) / static_cast<double>(p);
  const double Td = static_cast<double>(T);
  const double decay = std::pow(1.0 - r, Td);

  double energy = 0.0;
  for (const auto& wi : w) energy += wi.squaredNorm();
  double spread = 0.0;
  for (std::size_t tau = 1; tau <= T; ++tau) {
    double s = 0.0;
    for (const auto& wi : w) s += (w[tau - 1] - wi).squaredNorm();
    spread += r * std::pow(1.0 - r, static_cast<double>(T - tau)) * s;
  }
  const double pd = static_cast<double>(p);
  return decay / Td * energy + spread / Td + pd * sigma2 / (pd - static_cast<double>(n) - 1.0) * (1.0 - decay);
}

double theorem2_error(const Vector& w_star, double sigma2, const TheoryDims& dims) {
  const std::size_t T = dims.T();
  if (w_star.size() != static_cast<Eigen::Index>(dims.p())) throw DimensionError("theorem2_error: w* length");
  if (T == 0) return w_star.squaredNorm() + sigma2;
  if (dims.divergent()) return kDivergent;
  const auto h = dims.h_table(T);
  const double K2 = static_cast<double>(dims.K() * dims.K());
  double weighted_norm = 0.0;
  std::size_t off = 0;
  for (std::size_t k = 0; k < dims.K(); ++k) {
    const auto pk = dims.sizes()[k];
    weighted_norm +=
        h[1][k] * w_star.segment(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(pk)).squaredNorm();
    off += pk;
  }
  double noise = K2;
  for (std::size_t tau = 1; tau <= T; ++tau)
    for (std::size_t k = 0; k < dims.K(); ++k) noise += dims.gamma(tau, k) * h[tau + 1][k];
  return weighted_norm + sigma2 * noise / K2;
}

std::vector<bool> zero_error_conditions(const TheoryDims& dims) {
  const auto [mn, mx] = std::minmax_element(dims.sizes().begin(), dims.sizes().end());
  const double p_min = static_cast<double>(*mn);
  const double p_max = static_cast<double>(*mx);
  const double Kd = static_cast<double>(dims.K());
  const double c = (Kd - 1.0) / (2.0 * Kd - 1.0);
  std::vector<bool> out;
  out.reserve(dims.T());
  for (auto nt : dims.n()) {
    const double n = static_cast<double>(nt);
    out.push_back(n < p_min - c * p_max - 1.0 || n > p_max + c * p_min + 1.0);
  }
  return out;
}

PsiCoeffs psi_coeffs(std::size_t n, std::size_t p, std::size_t K, std::size_t T) {
  if (T < 1) throw ParameterError("psi_coeffs: T must be >= 1");
  const ScalarCoeffs c = h_equal(n, p, K);
  PsiCoeffs psi;
  if (c.divergent) {
    psi.psi0 = psi.psi1 = psi.psi2 = psi.psi3 = psi.psi4 = kDivergent;
    psi.divergent = true;
    return psi;
  }
  constexpr double kTol = 1e-12;
  const double Kd = static_cast<double>(K);
  const double K2 = Kd * Kd;
  const double Td = static_cast<double>(T);
  const double h = c.h, b = c.b, r = c.r, g = c.gamma;
  if (std::abs(1.0 - h) < kTol) throw DegenerateParameterError("psi_coeffs: h == 1");
  if (K > 1 && std::abs(b - h) < kTol) throw DegenerateParameterError("psi_coeffs: b == h");

  const double hT = std::pow(h, Td);
  const double geo_h = (1.0 - hT) / (1.0 - h);
  psi.psi0 = 1.0 + g / Kd * geo_h;
  psi.psi1 = hT;
  psi.psi2 = (r + (Kd - 1.0) * g) / K2 * (Td - 1.0) / Td * geo_h;
  if (K > 1) {
    const double bT = std::pow(b, Td);
    const double lead = 2.0 * (Kd - 1.0) * (r - g) / K2;
    psi.psi3 = lead * (Td - 1.0) / Td * (hT - bT) / (h - b);
    psi.psi4 = lead * (Td - 2.0) / Td * (geo_h - (bT - hT) / (b - h));
  }
  return psi;
}

double corollary4_error(std::size_t p, std::size_t p_shared, double e_w, double sigma2, std::size_t n, std::size_t K,
                        std::size_t T) {
  if (p_shared > p) throw ParameterError("corollary4_error: p_shared > p");
  const PsiCoeffs psi = psi_coeffs(n, p, K, T);
  if (psi.divergent) return kDivergent;
  const double own = static_cast<double>(p - p_shared) / static_cast<double>(p);
  return psi.psi0 * sigma2 + (psi.psi1 + own * (2.0 * psi.psi2 + psi.psi3 + psi.psi4)) * e_w;
}

double limit_error_infT(std::size_t p, std::size_t p_shared, double e_w, double sigma2, std::size_t n,
                        std::size_t K) {
  if (p_shared > p) throw ParameterError("limit_error_infT: p_shared > p");
  constexpr double kMargin = 1e-12;
  const ScalarCoeffs c = h_equal(n, p, K);
  if (c.divergent || !(std::abs(c.h) < 1.0 - kMargin)) return kDivergent;
  const double Kd = static_cast<double>(K);
  const double own = static_cast<double>(p - p_shared) / static_cast<double>(p);
  return (1.0 + c.gamma / Kd / (1.0 - c.h)) * sigma2 + 2.0 * c.r / Kd / (1.0 - c.h) * own * e_w;
}

double IdentityReport::max_diag_rel_error() const {
  double worst = 0.0;
  for (const Matrix* m : {&ata, &apa, &aat_pinv, &cross})
    worst = std::max(worst, (m->diagonal().array() - 1.0).abs().maxCoeff());
  return worst;
}

double IdentityReport::max_offdiag_abs() const {
  double worst = 0.0;
  for (const Matrix* m : {&ata, &apa, &aat_pinv, &cross}) {
    Matrix off = *m;
    off.diagonal().setZero();
    worst = std::max(worst, off.cwiseAbs().maxCoeff());
  }
  return worst;
}

IdentityReport gaussian_identity_stats(std::size_t n, std::size_t p_k, std::size_t trials, RngStream& rng) {
  if (trials < 1) throw ParameterError("gaussian_identity_stats: trials must be >= 1");
  const Coeff c = coeffs(n, p_k);
  if (c.divergent) throw ParameterError("gaussian_identity_stats: p_k must lie outside [n - 1, n + 1]");
  const auto ni = static_cast<Eigen::Index>(n);
  const auto pi = static_cast<Eigen::Index>(p_k);

  IdentityReport rep;
  rep.n = n;
  rep.p_k = p_k;
  rep.trials = trials;
  rep.r = c.r;
  rep.gamma = c.gamma;
  rep.ata = Matrix::Zero(pi, pi);
  rep.apa = Matrix::Zero(pi, pi);
  rep.aat_pinv = Matrix::Zero(ni, ni);
  rep.cross = Matrix::Zero(pi, pi);

  for (std::size_t s = 0; s < trials; ++s) {
    const Matrix A = sample_gaussian(ni, pi, rng);
    const Matrix B = sample_gaussian(ni, pi, rng);
    const Matrix gram_pinv = pinv(A * A.transpose());
    rep.ata.noalias() += A.transpose() * A;
    rep.apa.noalias() += pinv(A) * A;
    rep.aat_pinv += gram_pinv;
    rep.cross.noalias() += B.transpose() * gram_pinv * B;
  }
  const double tr = static_cast<double>(trials);
  rep.ata /= tr * static_cast<double>(n);
  rep.apa /= tr * c.r;
  rep.aat_pinv *= static_cast<double>(n) / (tr * c.gamma);
  rep.cross /= tr * c.gamma;
  return rep;
}

}  // namespace dcl::theory
