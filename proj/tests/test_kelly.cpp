#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "effsize/kelly.hpp"
#include "oracles.hpp"

namespace effsize {
namespace {

// Reference values from an independent bracketing root-finder on dG/df.
constexpr double kTotalM10P055C02 = 0.3514122508946557;
constexpr double kMefM10P055C03 = 2.7279477075378233;
constexpr double kFig2G0 = -0.0438877270657254;
constexpr double kFig2GStar = 0.01770596831756948;
constexpr double kFig2G005 = 0.002624777848957517;
constexpr double kFig2G035 = 0.015857876291794838;

TEST(KellyFractionBinary, Examples) {
  EXPECT_EQ(kelly_fraction_binary(0.5), 0.0);
  EXPECT_DOUBLE_EQ(kelly_fraction_binary(0.75), 0.5);
  EXPECT_EQ(kelly_fraction_binary(0.3), 0.0);
  EXPECT_THROW(kelly_fraction_binary(1.2), DomainError);
}

TEST(GrowthRate, Examples) {
  const auto one = build_joint({1, 0.6, 0.0});
  EXPECT_EQ(growth_rate(PortfolioWeights::even(1, 0.0), one), 0.0);
  EXPECT_NEAR(growth_rate(PortfolioWeights::even(1, 0.2), one),
              0.6 * std::log(1.2) + 0.4 * std::log(0.8), 1e-15);
  EXPECT_NEAR(growth_rate(PortfolioWeights::even(1, 0.2), one), 0.020136, 1e-6);
}

TEST(GrowthRate, Bankruptcy) {
  const auto dist = build_joint({4, 0.6, 0.3});
  EXPECT_THROW(growth_rate(PortfolioWeights::even(4, 0.26), dist), BankruptcyError);
  EXPECT_THROW(growth_rate(PortfolioWeights::even(4, 0.25), dist), BankruptcyError);
  EXPECT_THROW(growth_rate(PortfolioWeights::even(3, 0.1), dist), InputShapeError);
}

TEST(GrowthRate, ZeroProbabilityOutcomesIgnored) {
  // With C = 1 mixed outcomes never occur, so a long/short pair cannot go bust.
  const auto dist = build_joint({2, 0.6, 1.0});
  const PortfolioWeights f(std::vector<double>{0.9, -0.9});
  EXPECT_NEAR(growth_rate(f, dist), 0.0, 1e-15);
}

TEST(GrowthRate, MatchesHandEnumeration) {
  const auto dist = build_joint({6, 0.55, 0.35});
  const auto table = oracle::hidden_asset_table(6, 0.55, 0.35);
  for (double f : {0.0, 0.01, 0.05, 0.1, 0.16}) {
    EXPECT_NEAR(growth_rate(PortfolioWeights::even(6, f), dist),
                oracle::symmetric_growth(f, 6, table), 1e-14);
  }
}

TEST(KellyFirstOrder, SingleBinaryAsset) {
  for (double p : {0.55, 0.6, 0.75}) {
    const double mu = 2 * p - 1;
    const double sigma = std::sqrt(1 - mu * mu);
    const auto r = kelly_first_order(mu, sigma, invert(CorrelationMatrix(MatrixXd::Ones(1, 1))));
    EXPECT_NEAR(r.fractions[0], 2 * p - 1, 1e-14);
    EXPECT_FALSE(r.clipped);
  }
}

TEST(KellyFirstOrder, UniformExample) {
  const double mu = 0.1;
  const double sigma = std::sqrt(0.99);
  const auto cinv = invert(uniform_matrix(10, 0.2));
  const auto r = kelly_first_order(mu, sigma, cinv);
  const double mef = 10.0 / 2.8;
  const double each = mu / (2.8 * (0.99 + 0.01 * mef));
  for (Index i = 0; i < 10; ++i) EXPECT_NEAR(r.fractions[i], each, 1e-14);
  EXPECT_NEAR(r.fractions.total(), 0.3482, 5e-5);
}

TEST(KellyFirstOrder, Identity) {
  for (Index m : {1, 5, 20}) {
    const auto r = kelly_first_order(0.1, 1.0, invert(CorrelationMatrix(MatrixXd::Identity(m, m))));
    for (Index i = 0; i < m; ++i) EXPECT_NEAR(r.fractions[i], 0.1 / (1 + 0.01 * m), 1e-15);
  }
}

TEST(KellyFirstOrder, AbstainAndClip) {
  const auto cinv = invert(uniform_matrix(3, 0.2));
  const auto none = kelly_first_order(-0.05, 1.0, cinv);
  EXPECT_EQ(none.fractions.total(), 0.0);
  EXPECT_FALSE(none.clipped);

  Eigen::MatrixXd m(3, 3);
  m << 1, 0.9, 0.1, 0.9, 1, 0.5, 0.1, 0.5, 1;
  const auto r = kelly_first_order(0.1, 1.0, invert(CorrelationMatrix(m)));
  EXPECT_TRUE(r.clipped);
  EXPECT_TRUE(r.fractions.is_long_only());
}

TEST(MaximizeGrowthSymmetric, SingleAssetReduction) {
  for (double p : {0.3, 0.5, 0.55, 0.6, 0.75}) {
    const auto r = maximize_growth_symmetric(build_joint({1, p, 0.0}));
    EXPECT_NEAR(r.per_asset(), std::max(2 * p - 1, 0.0), 1e-8) << p;
  }
}

TEST(MaximizeGrowthSymmetric, PerfectCorrelation) {
  const auto r = maximize_growth_symmetric(build_joint({10, 0.6, 1.0}));
  EXPECT_NEAR(r.total_fraction, 0.2, 1e-8);
  EXPECT_NEAR(r.per_asset(), 0.02, 1e-9);
}

TEST(MaximizeGrowthSymmetric, AgreesWithFirstOrderAtSmallEdge) {
  const auto r = maximize_growth_symmetric(build_joint({10, 0.55, 0.2}));
  EXPECT_NEAR(r.total_fraction, 0.348, 0.01);
  EXPECT_NEAR(r.total_fraction, kTotalM10P055C02, 1e-10);
}

TEST(MaximizeGrowthSymmetric, StationaryAndMatchesBisection) {
  for (double p : {0.55, 0.6, 0.7}) {
    for (double c : {0.0, 0.1, 0.3, 0.6, 0.9}) {
      const auto table = oracle::hidden_asset_table(10, p, c);
      const auto r = maximize_growth_symmetric(build_joint({10, p, c}));
      const double f = r.per_asset();
      EXPECT_NEAR(f, oracle::symmetric_optimum(10, p, c), 1e-10);
      if (f > 0 && f < (1 - 1e-9) / 10) {
        EXPECT_LE(std::abs(oracle::symmetric_slope(f, 10, table)), 1e-9);
      }
      EXPECT_GE(r.G_star, 0.0);
      EXPECT_GE(r.total_fraction, 0.0);
      EXPECT_LT(r.total_fraction, 1.0);
    }
  }
}

TEST(MaximizeGrowthSymmetric, BeatsRandomFeasiblePortfolios) {
  std::mt19937 rng(21);
  for (double c : {0.0, 0.2, 0.5}) {
    const Index m = 6;
    const auto dist = build_joint({m, 0.6, c});
    const auto best = maximize_growth_symmetric(dist);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      VectorXd f(m);
      for (Index i = 0; i < m; ++i) f(i) = u(rng);
      f *= u(rng) * 0.999 / f.sum();
      EXPECT_LE(growth_rate(PortfolioWeights(f), dist), best.G_star + 1e-10);
    }
  }
}

TEST(MaximizeGrowthSymmetric, RejectsNonExchangeable) {
  const auto asym = JointBinaryDistribution::from_probabilities(2, {0.1, 0.2, 0.3, 0.4});
  EXPECT_THROW(maximize_growth_symmetric(asym), DomainError);
}

TEST(UncorrelatedTotalFraction, TableAtP06) {
  const UncorrelatedTotalFraction table(10, 0.6);
  const std::vector<double> expected{0.2, 0.3846, 0.5526, 0.7016, 0.8269,
                                     0.9195, 0.9707, 0.9903, 0.9967, 0.99885};
  for (Index m = 1; m <= 10; ++m) {
    EXPECT_NEAR(table.at(m), expected[static_cast<std::size_t>(m - 1)], 1e-4) << m;
    if (m > 1) {
      EXPECT_GT(table.at(m), table.at(m - 1));
    }
  }
}

TEST(UncorrelatedTotalFraction, InversionAndExtrapolation) {
  const UncorrelatedTotalFraction table(5, 0.55);
  for (Index m = 1; m <= 5; ++m) EXPECT_NEAR(table.invert(table.at(m)), static_cast<double>(m), 1e-12);
  const double mid = 0.5 * (table.at(2) + table.at(3));
  EXPECT_NEAR(table.invert(mid), 2.5, 1e-12);
  try {
    table.invert(0.01);
    FAIL() << "expected ExtrapolationError";
  } catch (const ExtrapolationError& e) {
    EXPECT_EQ(e.nearest_bound(), 1.0);
  }
  EXPECT_THROW(table.invert(0.999), ExtrapolationError);
  EXPECT_THROW(UncorrelatedTotalFraction(5, 0.5), DomainError);
}

TEST(MEfKellyNumeric, Limits) {
  EXPECT_NEAR(m_ef_kelly_numeric(10, 0.55, 0.0), 10.0, 1e-9);
  EXPECT_NEAR(m_ef_kelly_numeric(10, 0.55, 1.0), 1.0, 1e-9);
  EXPECT_THROW(m_ef_kelly_numeric(21, 0.55, 0.2), EnumerationLimitError);
}

TEST(MEfKellyNumeric, SmallEdgeNearClosedForm) {
  const double v = m_ef_kelly_numeric(10, 0.55, 0.3);
  EXPECT_NEAR(v, 10.0 / 3.7, 0.15);
  EXPECT_NEAR(v, kMefM10P055C03, 1e-8);
}

TEST(MEfKellyNumeric, LargerEdgeDiscrepancyIsPositive) {
  const UncorrelatedTotalFraction ref70(10, 0.7);
  const UncorrelatedTotalFraction ref55(10, 0.55);
  for (double c : {0.15, 0.2, 0.25, 0.3, 0.35}) {
    const double approx = 10.0 / (1 + 9 * c);
    const double d70 = m_ef_kelly_numeric(ref70, 10, 0.7, c) - approx;
    const double d55 = m_ef_kelly_numeric(ref55, 10, 0.55, c) - approx;
    EXPECT_GT(d70, 0.0) << c;
    EXPECT_GT(d70, d55) << c;
  }
}

TEST(Misestimation, Fig2Values) {
  const std::vector<double> grid{0.0, 0.05, 0.2, 0.35};
  const auto rows = misestimation_experiment(10, 0.55, 0.2, grid);
  ASSERT_EQ(rows.size(), 4U);
  EXPECT_NEAR(rows[0].G_realized, kFig2G0, 1e-10);
  EXPECT_NEAR(rows[1].G_realized, kFig2G005, 1e-10);
  EXPECT_NEAR(rows[2].G_realized, kFig2GStar, 1e-10);
  EXPECT_NEAR(rows[3].G_realized, kFig2G035, 1e-10);
  EXPECT_LT(rows[0].G_realized, 0.0);
  EXPECT_LT(rows[1].G_realized, rows[3].G_realized);
  EXPECT_EQ(rows[2].C_assumed, 0.2);
}

TEST(Misestimation, CorrectGuessAttainsOptimum) {
  const std::vector<double> grid{0.3};
  const auto rows = misestimation_experiment(8, 0.6, 0.3, grid);
  EXPECT_NEAR(rows[0].G_realized, maximize_growth_symmetric(build_joint({8, 0.6, 0.3})).G_star, 1e-14);
}

TEST(Misestimation, UnimodalWithPeakAtTruth) {
  std::vector<double> grid;
  for (int k = 0; k <= 12; ++k) grid.push_back(0.05 * k);
  const auto rows = misestimation_experiment(10, 0.55, 0.2, grid);
  std::size_t peak = 0;
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (rows[k].G_realized > rows[peak].G_realized) peak = k;
  EXPECT_EQ(peak, 4U);
  for (std::size_t k = 1; k <= peak; ++k) EXPECT_GT(rows[k].G_realized, rows[k - 1].G_realized);
  for (std::size_t k = peak + 1; k < rows.size(); ++k) EXPECT_LT(rows[k].G_realized, rows[k - 1].G_realized);
}

}  // namespace
}  // namespace effsize
