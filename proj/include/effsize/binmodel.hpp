#pragma once

// Exchangeable +/-1 returns with uniform pairwise correlation C, induced by
// a hidden asset h that wins with probability p:
//
//   P(+_i | +_h) = p + (1-p) sqrt(C),   P(-_i | -_h) = 1 - p + p sqrt(C)
//
// Given h the assets are independent. Each asset then wins with probability
// p and every pair has correlation C.
//
// Outcomes are encoded as bit masks: bit i set means asset i returned +1.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "effsize/corrmat.hpp"
#include "effsize/errors.hpp"
#include "effsize/random.hpp"

namespace effsize {

inline constexpr Index kMaxEnumeratedAssets = 20;

struct BinaryModelParams {
  Index M = 1;
  double p = 0.5;
  double C = 0.0;

  void validate() const {
    if (M < 1) throw DomainError("binary model needs M >= 1");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("binary model needs p in (0, 1)");
    if (!(C >= 0.0 && C <= 1.0)) throw DomainError("binary model needs C in [0, 1]");
  }

  double up_given_up() const { return p + (1.0 - p) * std::sqrt(C); }
  double down_given_down() const { return 1.0 - p + p * std::sqrt(C); }
};

class JointBinaryDistribution {
public:
  /// Table indexed by outcome mask; must be nonnegative and sum to 1.
  static JointBinaryDistribution from_probabilities(Index m, const std::vector<double>& probs) {
    check_enumerable(m);
    if (probs.size() != (std::size_t{1} << m)) {
      throw InputShapeError("probability table must have 2^M entries");
    }
    double total = 0.0;
    std::vector<double> logs(probs.size());
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (!(probs[k] >= 0.0)) throw DomainError("negative outcome probability");
      total += probs[k];
      logs[k] = std::log(probs[k]);
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw DomainError("outcome probabilities sum to " + std::to_string(total));
    }
    return JointBinaryDistribution(m, std::move(logs));
  }

  Index asset_count() const noexcept { return m_; }
  std::size_t outcome_count() const noexcept { return log_probs_.size(); }

  double log_probability(std::uint32_t mask) const { return log_probs_.at(mask); }
  double probability(std::uint32_t mask) const { return std::exp(log_probs_.at(mask)); }

  std::vector<double> probabilities() const {
    std::vector<double> out(log_probs_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::exp(log_probs_[k]);
    return out;
  }

  static double sign(std::uint32_t mask, Index asset) {
    return ((mask >> asset) & 1U) != 0U ? 1.0 : -1.0;
  }

  VectorXd outcome(std::uint32_t mask) const {
    VectorXd r(m_);
    for (Index i = 0; i < m_; ++i) r(i) = sign(mask, i);
    return r;
  }

  /// P(exactly k assets win), k = 0..M.
  std::vector<double> win_count_distribution() const {
    std::vector<double> out(static_cast<std::size_t>(m_) + 1, 0.0);
    for (std::uint32_t mask = 0; mask < log_probs_.size(); ++mask) {
      out[static_cast<std::size_t>(std::popcount(mask))] += std::exp(log_probs_[mask]);
    }
    return out;
  }

  double marginal_up(Index i) const {
    double up = 0.0;
    for (std::uint32_t mask = 0; mask < log_probs_.size(); ++mask) {
      if (((mask >> i) & 1U) != 0U) up += std::exp(log_probs_[mask]);
    }
    return up;
  }

  /// Pearson correlation of the +/-1 returns of assets i and j.
  double pairwise_correlation(Index i, Index j) const {
    double ei = 0.0, ej = 0.0, eij = 0.0;
    for (std::uint32_t mask = 0; mask < log_probs_.size(); ++mask) {
      const double pr = std::exp(log_probs_[mask]);
      const double ri = sign(mask, i);
      const double rj = sign(mask, j);
      ei += pr * ri;
      ej += pr * rj;
      eij += pr * ri * rj;
    }
    const double vi = 1.0 - ei * ei;
    const double vj = 1.0 - ej * ej;
    if (vi <= 0.0 || vj <= 0.0) return 0.0;
    return (eij - ei * ej) / std::sqrt(vi * vj);
  }

  /// Whether the probability of an outcome depends only on its win count.
  bool is_exchangeable(double tol = 1e-12) const {
    std::vector<double> first(static_cast<std::size_t>(m_) + 1, -1.0);
    for (std::uint32_t mask = 0; mask < log_probs_.size(); ++mask) {
      const double pr = std::exp(log_probs_[mask]);
      double& ref = first[static_cast<std::size_t>(std::popcount(mask))];
      if (ref < 0.0) {
        ref = pr;
      } else if (std::abs(ref - pr) > tol) {
        return false;
      }
    }
    return true;
  }

private:
  friend JointBinaryDistribution build_joint(const BinaryModelParams& params);

  JointBinaryDistribution(Index m, std::vector<double> log_probs)
      : m_(m), log_probs_(std::move(log_probs)) {}

  static void check_enumerable(Index m) {
    if (m < 1) throw DomainError("distribution needs at least one asset");
    if (m > kMaxEnumeratedAssets) {
      throw EnumerationLimitError("exact enumeration supports at most " +
                                  std::to_string(kMaxEnumeratedAssets) + " assets, got " +
                                  std::to_string(m) + "; sample instead");
    }
  }

  Index m_;
  std::vector<double> log_probs_;
};

namespace detail {

// n * log(x) with 0 * log(0) = 0.
inline double xlogy(double n, double x) { return n == 0.0 ? 0.0 : n * std::log(x); }

inline double log_add_exp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace detail

/// Exact table over all 2^M outcomes.
inline JointBinaryDistribution build_joint(const BinaryModelParams& params) {
  params.validate();
  JointBinaryDistribution::check_enumerable(params.M);
  const Index m = params.M;
  const double a = params.up_given_up();
  const double b = params.down_given_down();
  const double log_p = std::log(params.p);
  const double log_q = std::log1p(-params.p);

  // The probability of an outcome depends only on its number of winners.
  std::vector<double> by_count(static_cast<std::size_t>(m) + 1);
  for (Index k = 0; k <= m; ++k) {
    const double wins = static_cast<double>(k);
    const double losses = static_cast<double>(m - k);
    const double hidden_up = log_p + detail::xlogy(wins, a) + detail::xlogy(losses, 1.0 - a);
    const double hidden_down = log_q + detail::xlogy(wins, 1.0 - b) + detail::xlogy(losses, b);
    by_count[static_cast<std::size_t>(k)] = detail::log_add_exp(hidden_up, hidden_down);
  }
  std::vector<double> logs(std::size_t{1} << m);
  for (std::uint32_t mask = 0; mask < logs.size(); ++mask) {
    logs[mask] = by_count[static_cast<std::size_t>(std::popcount(mask))];
  }
  return JointBinaryDistribution(m, std::move(logs));
}

/// n x M matrix of +/-1 returns: per row, draw h, then each asset given h.
/// Identical (params, n, seed) give identical output.
inline MatrixXd sample(const BinaryModelParams& params, Index n, std::uint64_t seed) {
  params.validate();
  if (n < 1) throw DomainError("sample size must be at least 1");
  const double a = params.up_given_up();
  const double b = params.down_given_down();
  Rng rng(seed);
  MatrixXd out(n, params.M);
  for (Index t = 0; t < n; ++t) {
    const bool hidden_up = rng.bernoulli(params.p);
    for (Index i = 0; i < params.M; ++i) {
      const bool up = hidden_up ? rng.bernoulli(a) : !rng.bernoulli(b);
      out(t, i) = up ? 1.0 : -1.0;
    }
  }
  return out;
}

}  // namespace effsize
