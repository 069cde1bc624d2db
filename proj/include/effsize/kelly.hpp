#pragma once

// Kelly portfolios: exponential growth rate G = <ln(1 + sum f_i R_i)>, its
// maximization for exchangeable binary assets, the first-order analytic
// fractions, and the effective size obtained by matching total investment
// against uncorrelated assets.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "effsize/binmodel.hpp"
#include "effsize/corrmat.hpp"
#include "effsize/errors.hpp"
#include "effsize/golden_section.hpp"
#include "effsize/meanvar.hpp"

namespace effsize {

/// Slack keeping the symmetric fraction strictly below 1/M, where the
/// all-losses outcome would wipe out the investor.
inline constexpr double kFeasibilitySlack = 1e-9;

/// Golden-section bracket width at which the symmetric search stops.
inline constexpr double kGoldenTolerance = 1e-12;

enum class GrowthMethod { analytic_first_order, numeric_exact };

struct GrowthResult {
  PortfolioWeights f_star;
  double G_star = 0.0;
  double total_fraction = 0.0;
  GrowthMethod method = GrowthMethod::numeric_exact;

  /// Fraction held in each asset of a symmetric optimum.
  double per_asset() const { return f_star.size() == 0 ? 0.0 : f_star[0]; }
};

struct FirstOrderKelly {
  PortfolioWeights fractions;
  /// Set when some raw fraction was negative and has been clipped to zero,
  /// i.e. the linearized solution asked for a short position.
  bool clipped = false;
};

struct MisestimationResult {
  double C_true = 0.0;
  double C_assumed = 0.0;
  double f_assumed = 0.0;
  double G_realized = 0.0;
};

/// Single even-odds bet: f* = 2p - 1, or 0 (abstain) when p < 1/2.
inline double kelly_fraction_binary(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("kelly_fraction_binary: p must lie in [0, 1]");
  }
  return std::max(2.0 * p - 1.0, 0.0);
}

/// Sum over outcomes of P(R) ln(1 + f.R).
inline double growth_rate(const PortfolioWeights& f, const JointBinaryDistribution& dist) {
  const Index m = dist.asset_count();
  if (f.size() != m) {
    throw InputShapeError("growth_rate: " + std::to_string(f.size()) + " weights for " +
                          std::to_string(m) + " assets");
  }
  double g = 0.0;
  for (std::uint32_t mask = 0; mask < dist.outcome_count(); ++mask) {
    const double pr = dist.probability(mask);
    if (pr == 0.0) continue;
    double wealth = 1.0;
    for (Index i = 0; i < m; ++i) wealth += f[i] * JointBinaryDistribution::sign(mask, i);
    if (!(wealth > 0.0)) {
      throw BankruptcyError("growth_rate: an outcome with probability " + std::to_string(pr) +
                            " leaves wealth " + std::to_string(wealth));
    }
    g += pr * std::log(wealth);
  }
  return g;
}

/// Linearized Kelly solution for identical assets,
///   f* = mu C^-1 1 / (sigma^2 + mu^2 sum_ij (C^-1)_ij),
/// with negative entries clipped to zero. mu <= 0 means abstain.
inline FirstOrderKelly kelly_first_order(double mu, double sigma,
                                         const InverseCorrelationMatrix& cinv) {
  const Index m = cinv.dim();
  if (!std::isfinite(mu) || !std::isfinite(sigma) || sigma < 0.0) {
    throw DomainError("kelly_first_order: need finite mu and sigma >= 0");
  }
  if (mu <= 0.0) {
    return {PortfolioWeights(VectorXd::Zero(m)), false};
  }
  const double denom = sigma * sigma + mu * mu * cinv.total();
  if (!(denom > 0.0)) {
    throw DomainError("kelly_first_order: sigma^2 + mu^2 sum(C^-1) is not positive");
  }
  VectorXd f = (mu / denom) * cinv.row_sums();
  const bool clipped = f.minCoeff() < 0.0;
  f = f.cwiseMax(0.0);
  return {PortfolioWeights(std::move(f)), clipped};
}

namespace detail {

// G(f) for an even split over exchangeable assets, with outcomes grouped by
// their sum s_k = 2k - M.
class SymmetricGrowth {
public:
  explicit SymmetricGrowth(const JointBinaryDistribution& dist) : m_(dist.asset_count()) {
    const auto counts = dist.win_count_distribution();
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (counts[k] == 0.0) continue;
      probs_.push_back(counts[k]);
      sums_.push_back(2.0 * static_cast<double>(k) - static_cast<double>(m_));
    }
  }

  double value(double f) const {
    double g = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k) g += probs_[k] * std::log1p(f * sums_[k]);
    return g;
  }

  double slope(double f) const {
    double d = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k) d += probs_[k] * sums_[k] / (1.0 + f * sums_[k]);
    return d;
  }

  double curvature(double f) const {
    double c = 0.0;
    for (std::size_t k = 0; k < probs_.size(); ++k) {
      const double x = sums_[k] / (1.0 + f * sums_[k]);
      c -= probs_[k] * x * x;
    }
    return c;
  }

  Index assets() const { return m_; }

private:
  Index m_;
  std::vector<double> probs_;
  std::vector<double> sums_;
};

}  // namespace detail

/// Maximizes G over even splits f in [0, (1 - 1e-9)/M]. G is concave in f;
/// golden-section search locates the optimum, then safeguarded Newton steps
/// on dG/df sharpen it beyond what comparing G values can resolve.
inline GrowthResult maximize_growth_symmetric(const JointBinaryDistribution& dist) {
  if (!dist.is_exchangeable()) {
    throw DomainError("maximize_growth_symmetric: distribution is not exchangeable");
  }
  const detail::SymmetricGrowth g(dist);
  const Index m = g.assets();
  const double upper = (1.0 - kFeasibilitySlack) / static_cast<double>(m);

  double f = 0.0;
  if (g.slope(0.0) > 0.0) {
    const ScalarMaximum coarse =
        golden_section_maximize([&](double x) { return g.value(x); }, 0.0, upper, kGoldenTolerance);
    f = coarse.x;
    if (g.slope(upper) >= 0.0) {
      f = upper;
    } else {
      double lo = 0.0;
      double hi = upper;
      for (int it = 0; it < 100; ++it) {
        const double d = g.slope(f);
        if (d == 0.0) break;
        (d > 0.0 ? lo : hi) = f;
        double next = f - d / g.curvature(f);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - f);
        f = next;
        if (step <= 1e-17 || hi - lo <= 1e-17) break;
      }
    }
  }
  GrowthResult r;
  r.f_star = PortfolioWeights::even(m, f);
  r.G_star = f == 0.0 ? 0.0 : std::max(g.value(f), 0.0);
  r.total_fraction = static_cast<double>(m) * f;
  r.method = GrowthMethod::numeric_exact;
  return r;
}

/// Total optimal fraction F(m) = m f*(m, id) for m = 1..M uncorrelated
/// binary assets, and the piecewise-linear inverse of that table.
class UncorrelatedTotalFraction {
public:
  UncorrelatedTotalFraction(Index max_assets, double p) : p_(p) {
    if (max_assets < 1 || max_assets > kMaxEnumeratedAssets) {
      throw EnumerationLimitError("uncorrelated reference needs 1 <= M <= " +
                                  std::to_string(kMaxEnumeratedAssets));
    }
    if (!(p > 0.5 && p < 1.0)) {
      throw DomainError("effective Kelly size needs p in (0.5, 1); at p <= 0.5 every "
                        "optimal fraction is zero");
    }
    for (Index k = 1; k <= max_assets; ++k) {
      totals_.push_back(maximize_growth_symmetric(build_joint({k, p, 0.0})).total_fraction);
    }
  }

  double p() const noexcept { return p_; }
  Index max_assets() const noexcept { return static_cast<Index>(totals_.size()); }

  /// F(m) for integer m in 1..max_assets.
  double at(Index m) const { return totals_.at(static_cast<std::size_t>(m - 1)); }

  /// Real m with F(m) = total, interpolating linearly between integers.
  double invert(double total) const {
    constexpr double snap = 1e-12;
    const double lo = totals_.front();
    const double hi = totals_.back();
    if (total < lo - snap || total > hi + snap) {
      const double nearest = total < lo ? 1.0 : static_cast<double>(totals_.size());
      throw ExtrapolationError("total fraction " + std::to_string(total) +
                                   " lies outside the uncorrelated range [" +
                                   std::to_string(lo) + ", " + std::to_string(hi) + "]",
                               nearest);
    }
    if (total <= lo) return 1.0;
    if (total >= hi) return static_cast<double>(totals_.size());
    const auto it = std::upper_bound(totals_.begin(), totals_.end(), total);
    const auto k = static_cast<std::size_t>(it - totals_.begin());  // totals_[k-1] <= total < totals_[k]
    const double a = totals_[k - 1];
    const double b = totals_[k];
    return static_cast<double>(k) + (total - a) / (b - a);
  }

private:
  double p_;
  std::vector<double> totals_;
};

/// Effective Kelly size from exact maximization: the m whose uncorrelated
/// optimum invests the same total as M assets with uniform correlation C.
inline double m_ef_kelly_numeric(const UncorrelatedTotalFraction& reference, Index m, double p,
                                 double c) {
  if (m > reference.max_assets() || reference.p() != p) {
    throw InputShapeError("reference table does not cover (M, p)");
  }
  const double total = maximize_growth_symmetric(build_joint({m, p, c})).total_fraction;
  return reference.invert(total);
}

inline double m_ef_kelly_numeric(Index m, double p, double c) {
  if (m > kMaxEnumeratedAssets) {
    throw EnumerationLimitError("m_ef_kelly_numeric supports at most " +
                                std::to_string(kMaxEnumeratedAssets) + " assets");
  }
  BinaryModelParams{m, p, c}.validate();
  return m_ef_kelly_numeric(UncorrelatedTotalFraction(m, p), m, p, c);
}

/// For each assumed correlation, optimize as if it were true and score the
/// resulting even split under the true correlation.
inline std::vector<MisestimationResult> misestimation_experiment(Index m, double p, double c_true,
                                                                 std::span<const double> assumed) {
  const JointBinaryDistribution truth = build_joint({m, p, c_true});
  std::vector<MisestimationResult> out;
  out.reserve(assumed.size());
  for (double c : assumed) {
    const GrowthResult opt = maximize_growth_symmetric(build_joint({m, p, c}));
    out.push_back({c_true, c, opt.per_asset(), growth_rate(opt.f_star, truth)});
  }
  return out;
}

}  // namespace effsize
