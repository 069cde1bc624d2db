#pragma once

// Mean-Variance quantities for identical assets (common mu and sigma),
// where only the correlation structure distinguishes one asset from another.
// A zero-return risk-free asset absorbs whatever wealth is not invested.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "effsize/corrmat.hpp"
#include "effsize/errors.hpp"

namespace effsize {

/// Fractions of wealth per asset. Negative entries are short positions.
class PortfolioWeights {
public:
  PortfolioWeights() = default;

  explicit PortfolioWeights(VectorXd fractions) : fractions_(std::move(fractions)) {
    for (Index i = 0; i < fractions_.size(); ++i) {
      if (!std::isfinite(fractions_(i))) {
        throw DomainError("portfolio weight " + std::to_string(i) + " is not finite");
      }
    }
  }

  explicit PortfolioWeights(const std::vector<double>& fractions)
      : PortfolioWeights(
            VectorXd(Eigen::Map<const VectorXd>(fractions.data(),
                                                static_cast<Index>(fractions.size())))) {}

  static PortfolioWeights even(Index m, double each) {
    return PortfolioWeights(VectorXd::Constant(m, each));
  }

  Index size() const noexcept { return fractions_.size(); }
  const VectorXd& fractions() const noexcept { return fractions_; }
  double operator[](Index i) const { return fractions_(i); }
  double total() const { return fractions_.sum(); }
  bool is_long_only() const { return size() == 0 || fractions_.minCoeff() >= 0.0; }

private:
  VectorXd fractions_;
};

struct IdenticalAssetParams {
  double mu = 0.0;
  double sigma = 1.0;
  Index M = 1;

  void validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw DomainError("identical assets need sigma > 0");
    }
    if (!std::isfinite(mu)) {
      throw DomainError("identical assets need a finite mu");
    }
    if (M < 1) {
      throw DomainError("identical assets need M >= 1");
    }
  }
};

struct PortfolioMoments {
  double expected_return = 0.0;
  double variance = 0.0;
};

/// R_P = sum f_i mu_i and V_P = sum f_i f_j C_ij sigma_i sigma_j.
inline PortfolioMoments portfolio_moments(const PortfolioWeights& f, const VectorXd& mu,
                                          const VectorXd& sigma, const CorrelationMatrix& c) {
  const Index m = c.dim();
  if (f.size() != m || mu.size() != m || sigma.size() != m) {
    throw InputShapeError("portfolio_moments: weights, means, deviations and correlation "
                          "matrix must share one dimension");
  }
  const VectorXd scaled = f.fractions().cwiseProduct(sigma);
  return {f.fractions().dot(mu), scaled.dot(c.entries() * scaled)};
}

namespace detail {

inline double checked_inverse_total(const IdenticalAssetParams& params,
                                    const InverseCorrelationMatrix& cinv) {
  params.validate();
  if (cinv.dim() != params.M) {
    throw InputShapeError("inverse correlation matrix has dimension " +
                          std::to_string(cinv.dim()) + ", expected " + std::to_string(params.M));
  }
  if (params.mu == 0.0) {
    throw DomainError("mean-variance optimum undefined for mu = 0");
  }
  const double s = cinv.total();
  if (!(s > 0.0)) {
    throw DomainError("sum of inverse correlation entries is not positive");
  }
  return s;
}

}  // namespace detail

/// Minimum variance reaching expected return target_return:
///   sigma^2 R_P^2 / (mu^2 sum_ij (C^-1)_ij).
inline double minimal_variance_identical(double target_return, const IdenticalAssetParams& params,
                                         const InverseCorrelationMatrix& cinv) {
  const double s = detail::checked_inverse_total(params, cinv);
  return params.sigma * params.sigma * target_return * target_return /
         (params.mu * params.mu * s);
}

/// The minimizer itself: f = R_P / (mu S) * C^-1 1 with S = 1' C^-1 1.
inline PortfolioWeights mv_optimal_weights(double target_return, const IdenticalAssetParams& params,
                                           const InverseCorrelationMatrix& cinv) {
  const double s = detail::checked_inverse_total(params, cinv);
  return PortfolioWeights(VectorXd((target_return / (params.mu * s)) * cinv.row_sums()));
}

}  // namespace effsize
