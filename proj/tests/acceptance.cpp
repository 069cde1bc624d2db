// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "effsize/binmodel.hpp"
#include "effsize/commands.hpp"
#include "effsize/effective_size.hpp"
#include "effsize/kelly.hpp"
#include "effsize/meanvar.hpp"
#include "oracles.hpp"

namespace {

using namespace effsize;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<double> c_grid(double lo, double hi, double step) {
  std::vector<double> out;
  for (int k = 0; lo + k * step <= hi + 1e-9; ++k) out.push_back(std::round((lo + k * step) * 1e12) / 1e12);
  return out;
}

Outcome closed_form() {
  double worst_m = 0.0, worst_inv = 0.0;
  for (Index m = 2; m <= 100; ++m) {
    for (double c : c_grid(0.0, 0.9, 0.1)) {
      const auto u = uniform_matrix(m, c);
      const auto numeric = invert(u);
      worst_m = std::max(worst_m, std::abs(m_ef_exact(numeric) - m_ef_uniform(m, c)));
      worst_inv = std::max(worst_inv, (uniform_inverse_closed_form(m, c).entries() - numeric.entries())
                                          .cwiseAbs()
                                          .maxCoeff());
    }
  }
  return {worst_m <= 1e-10 && worst_inv <= 1e-10,
          "max |m_ef - closed form| " + fmt("%.3g", worst_m) + ", max inverse entry diff " +
              fmt("%.3g", worst_inv)};
}

Outcome limit() {
  const double v = m_ef_uniform(1000000, 0.2);
  return {v >= 4.99 && v <= 5.0, "m_ef_uniform(1e6, 0.2) = " + fmt("%.10g", v)};
}

Outcome block_additivity() {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> nblocks(2, 4), size(2, 8);
  std::uniform_real_distribution<double> corr(0.0, 0.95);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<CorrelationMatrix> blocks;
    double sum = 0.0;
    for (int b = nblocks(rng); b > 0; --b) {
      blocks.push_back(uniform_matrix(size(rng), corr(rng)));
      sum += m_ef_exact(blocks.back());
    }
    worst = std::max(worst, std::abs(m_ef_exact(block_diagonal(blocks)) - sum));
  }
  return {worst <= 1e-8, "max deviation " + fmt("%.3g", worst) + " over 100 matrices"};
}

Outcome mean_variance() {
  std::mt19937 rng(77);
  std::normal_distribution<double> z(0.0, 0.05);
  std::uniform_int_distribution<int> dim(2, 12);
  double worst_r = 0.0, worst_v = 0.0;
  int beaten = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index m = dim(rng);
    const CorrelationMatrix c(oracle::random_correlation(m, rng));
    const auto cinv = invert(c);
    const IdenticalAssetParams params{0.08, 0.25, m};
    const double target = 0.05;
    const VectorXd mu = VectorXd::Constant(m, params.mu);
    const VectorXd sigma = VectorXd::Constant(m, params.sigma);
    const auto f = mv_optimal_weights(target, params, cinv);
    const auto mom = portfolio_moments(f, mu, sigma, c);
    const double v_star = minimal_variance_identical(target, params, cinv);
    worst_r = std::max(worst_r, std::abs(mom.expected_return - target));
    worst_v = std::max(worst_v, std::abs(mom.variance - v_star));
    for (int k = 0; k < 200; ++k) {
      VectorXd d(m);
      for (Index i = 0; i < m; ++i) d(i) = z(rng);
      d.array() -= d.mean();
      const auto other = portfolio_moments(PortfolioWeights(VectorXd(f.fractions() + d)), mu, sigma, c);
      if (other.variance < v_star - 1e-14) ++beaten;
    }
  }
  return {worst_r <= 1e-12 && worst_v <= 1e-10 && beaten == 0,
          "max |R_P - target| " + fmt("%.3g", worst_r) + ", max |V - V*| " + fmt("%.3g", worst_v) +
              ", perturbations with lower variance: " + std::to_string(beaten)};
}

Outcome kelly_reduction() {
  double worst = 0.0;
  for (double p : {0.3, 0.5, 0.55, 0.6, 0.75}) {
    const auto r = maximize_growth_symmetric(build_joint({1, p, 0.0}));
    worst = std::max(worst, std::abs(r.per_asset() - std::max(2 * p - 1, 0.0)));
  }
  return {worst <= 1e-8, "max |f* - max(2p-1, 0)| " + fmt("%.3g", worst)};
}

Outcome binary_model() {
  double worst_sum = 0.0, worst_marg = 0.0, worst_corr = 0.0;
  for (Index m : {2, 3, 5}) {
    for (double p : {0.55, 0.6, 0.7}) {
      for (double c : {0.0, 0.25, 0.5, 1.0}) {
        const auto dist = build_joint({m, p, c});
        double total = 0.0;
        for (double x : dist.probabilities()) total += x;
        worst_sum = std::max(worst_sum, std::abs(total - 1.0));
        for (Index i = 0; i < m; ++i) {
          worst_marg = std::max(worst_marg, std::abs(dist.marginal_up(i) - p));
          for (Index j = i + 1; j < m; ++j)
            worst_corr = std::max(worst_corr, std::abs(dist.pairwise_correlation(i, j) - c));
        }
      }
    }
  }
  return {worst_sum <= 1e-12 && worst_marg <= 1e-12 && worst_corr <= 1e-10,
          "sum " + fmt("%.3g", worst_sum) + ", marginal " + fmt("%.3g", worst_marg) +
              ", correlation " + fmt("%.3g", worst_corr)};
}

Outcome fig1() {
  const Index m = 10;
  const auto grid = c_grid(0.05, 0.95, 0.05);
  auto discrepancy = [&](double p) {
    const UncorrelatedTotalFraction ref(m, p);
    std::vector<double> d;
    for (double c : grid) d.push_back(m_ef_kelly_numeric(ref, m, p, c) - m_ef_uniform(m, c));
    return d;
  };
  const auto d55 = discrepancy(0.55);
  const auto d60 = discrepancy(0.60);
  const auto d70 = discrepancy(0.70);
  double max55 = 0.0, max60 = 0.0, c60 = 0.0;
  bool ordering = true;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    max55 = std::max(max55, std::abs(d55[k]));
    if (std::abs(d60[k]) > max60) {
      max60 = std::abs(d60[k]);
      c60 = grid[k];
    }
    if (grid[k] > 0.1 && grid[k] < 0.4) ordering = ordering && d70[k] > 0.0 && d70[k] > d55[k];
  }
  const bool pass = max55 <= 0.3 && max60 <= 0.3 && ordering;
  return {pass, "max |numeric - approx|: p=0.55 " + fmt("%.4g", max55) + ", p=0.60 " +
                    fmt("%.4g", max60) + " (at C=" + fmt("%.2f", c60) + "); p=0.70 positive and " +
                    "above p=0.55 on (0.1, 0.4): " + (ordering ? "yes" : "no")};
}

Outcome fig2() {
  const auto grid = c_grid(0.0, 0.6, 0.05);
  const auto rows = misestimation_experiment(10, 0.55, 0.2, grid);
  std::size_t peak = 0;
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (rows[k].G_realized > rows[peak].G_realized) peak = k;
  auto at = [&](double c) -> double {
    for (const auto& r : rows)
      if (std::abs(r.C_assumed - c) < 1e-9) return r.G_realized;
    return NAN;
  };
  const double g_star = at(0.2);
  const double g0 = at(0.0);
  const bool pass = std::abs(rows[peak].C_assumed - 0.2) < 1e-9 && at(0.05) < at(0.35) &&
                    g0 < 0.25 * g_star;
  return {pass, "peak at C'=" + fmt("%.2f", rows[peak].C_assumed) + ", G(0.05)=" +
                    fmt("%.5g", at(0.05)) + " < G(0.35)=" + fmt("%.5g", at(0.35)) + ", G(0)=" +
                    fmt("%.5g", g0) + (g0 < 0 ? " (negative)" : " (nonnegative)") + " vs G*=" +
                    fmt("%.5g", g_star)};
}

std::vector<std::vector<std::string>> table(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) rows.push_back(tsv::split(line, '\t'));
  return rows;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(EFFSIZE_CLI_PATH) + " " + args;
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("effsize_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

Outcome synthetic_pipeline() {
  const fs::path dir = scratch_dir();
  const std::string prices = (dir / "prices.csv").string();
  const std::string index = (dir / "index.csv").string();
  const std::string est = (dir / "est.tsv").string();
  const std::string eff = (dir / "eff.tsv").string();
  const std::string ratio = (dir / "ratio.tsv").string();
  const int rc = run_cli("synth --blocks 30 --C 0.322 --p 0.55 --days 100000 --seed 9 --index-out " +
                         index + " --out " + prices) +
                 run_cli("estimate-corr --prices " + prices + " --out " + est) +
                 run_cli("effsize --prices " + prices + " --out " + eff) +
                 run_cli("variance-ratio --index " + index + " --prices " + prices + " --out " + ratio);
  Outcome o;
  if (rc != 0) {
    o = {false, "a pipeline command failed"};
  } else {
    const double mean_c = std::stod(table(slurp(est))[1][2]);
    const double m_even = std::stod(table(slurp(eff))[1][3]);
    const double vr = std::stod(table(slurp(ratio))[1][3]);
    o.pass = std::abs(mean_c - 0.322) <= 0.01 && std::abs(m_even - 2.90) <= 0.1 &&
             std::abs(vr - m_even) <= 0.1 * m_even;
    o.detail = "<C> " + fmt("%.4f", mean_c) + ", m_even " + fmt("%.4f", m_even) +
               ", variance ratio " + fmt("%.4f", vr);
  }
  fs::remove_all(dir);
  return o;
}

Outcome determinism() {
  const fs::path dir = scratch_dir();
  const std::string prices = std::string(EFFSIZE_DATA_DIR) + "/sample_prices.csv";
  const std::string sectors = std::string(EFFSIZE_DATA_DIR) + "/sample_sectors.csv";
  const std::string a = (dir / "a.tsv").string();
  const std::string b = (dir / "b.tsv").string();
  const std::string args = "subset-curve --prices " + prices + " --sectors " + sectors +
                           " --sizes 2:30 --draws 5000 --seed 11 --out ";
  const int rc = run_cli(args + a) + run_cli(args + b);
  const std::string x = slurp(a);
  const std::string y = slurp(b);
  fs::remove_all(dir);
  return {rc == 0 && !x.empty() && x == y,
          std::to_string(x.size()) + " bytes, identical: " + (x == y ? "yes" : "no")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"closed-form equivalence", closed_form},
      {"large-M limit", limit},
      {"block additivity", block_additivity},
      {"mean-variance optimum", mean_variance},
      {"single-asset Kelly reduction", kelly_reduction},
      {"binary model correctness", binary_model},
      {"first-order vs numeric Kelly size", fig1},
      {"correlation mis-estimation curve", fig2},
      {"synthetic pipeline consistency", synthetic_pipeline},
      {"subset-curve determinism", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += o.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", k + 1,
                criteria[k].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
