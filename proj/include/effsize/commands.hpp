#pragma once

// Batch commands behind the effsize CLI. Each command reads its inputs,
// validates parameters before doing any work, and writes one tab-separated
// table to `out`. Diagnostics (dropped assets, skipped draws) go to `log`.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "effsize/binmodel.hpp"
#include "effsize/corrmat.hpp"
#include "effsize/effective_size.hpp"
#include "effsize/errors.hpp"
#include "effsize/kelly.hpp"
#include "effsize/marketdata.hpp"
#include "effsize/tsv.hpp"

namespace effsize::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

class UsageError : public Error {
public:
  using Error::Error;
};

inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return kUsage;
  if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const DataError*>(&e) ||
      dynamic_cast<const InputShapeError*>(&e)) {
    return kData;
  }
  if (dynamic_cast<const NearSingularError*>(&e) || dynamic_cast<const BankruptcyError*>(&e) ||
      dynamic_cast<const ExtrapolationError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const EnumerationLimitError*>(&e)) {
    return kNumerical;
  }
  return kData;
}

/// Runs body, printing any error to err and mapping it to an exit code.
inline int guarded(const std::function<void()>& body, std::ostream& err = std::cerr) {
  try {
    body();
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

/// Grid of reals: either a comma list "0.1,0.2" or a range "start:stop:step"
/// (stop included when reached within rounding).
inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  auto num = [&](const std::string& s) {
    const auto v = tsv::parse_double(tsv::trim(s));
    if (!v || !std::isfinite(*v)) throw UsageError("bad number '" + s + "' in grid '" + text + "'");
    return *v;
  };
  if (text.find(':') != std::string::npos) {
    const auto parts = tsv::split(text, ':');
    if (parts.size() != 3) throw UsageError("range grid must be start:stop:step");
    const double start = num(parts[0]);
    const double stop = num(parts[1]);
    const double step = num(parts[2]);
    if (!(step > 0.0) || stop < start) throw UsageError("range grid needs step > 0, stop >= start");
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long k = 0; k < n; ++k) {
      out.push_back(std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12);
    }
  } else {
    for (const auto& part : tsv::split(text, ',')) out.push_back(num(part));
  }
  if (out.empty()) throw UsageError("empty grid '" + text + "'");
  return out;
}

/// Integer list "2,5,10" or range "2:30" / "2:30:2".
inline std::vector<Index> parse_sizes(const std::string& text) {
  std::string spec = text;
  if (std::count(spec.begin(), spec.end(), ':') == 1) spec += ":1";
  std::vector<Index> out;
  for (double v : parse_grid(spec)) {
    if (v != std::floor(v)) throw UsageError("portfolio sizes must be integers: '" + text + "'");
    out.push_back(static_cast<Index>(v));
  }
  return out;
}

namespace detail {

inline void report_dropped(const PriceLoad& load, const std::string& path, std::ostream& log) {
  if (load.dropped.empty()) return;
  log << "warning: " << path << ": dropped " << load.dropped.size()
      << " asset(s) with missing quotes:";
  for (const auto& a : load.dropped) log << ' ' << a;
  log << '\n';
}

inline PricePanel load_panel(const std::string& path, std::ostream& log) {
  PriceLoad load = load_prices_file(path);
  report_dropped(load, path, log);
  return std::move(load.panel);
}

inline void check_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) throw UsageError(std::string(what) + " must lie in (0, 1)");
}

inline void check_correlations(const std::vector<double>& grid, const char* what) {
  for (double c : grid) {
    if (!(c >= 0.0 && c <= 1.0)) throw UsageError(std::string(what) + " values must lie in [0, 1]");
  }
}

inline std::vector<ReturnSeries> index_returns_for(const PricePanel& constituents,
                                                   const std::string& index_path,
                                                   std::ostream& log) {
  const PricePanel index = load_panel(index_path, log);
  if (index.asset_count() != 1) {
    throw DataError("index file must contain exactly one price column");
  }
  if (index.dates() != constituents.dates()) {
    throw DataError("index and constituent files must cover the same dates");
  }
  return compute_returns(index);
}

}  // namespace detail

// ---------------------------------------------------------------------------

struct EstimateCorrConfig {
  std::string prices;
  std::optional<std::string> matrix_out;
};

/// Columns: M, T (returns per asset), mean_corr, min_eigenvalue, max_eigenvalue.
inline void cmd_estimate_corr(const EstimateCorrConfig& cfg, std::ostream& out,
                              std::ostream& log = std::cerr) {
  const PricePanel panel = detail::load_panel(cfg.prices, log);
  const MatrixXd r = returns_matrix(panel);
  const CorrelationMatrix c = estimate_matrix(r);
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(c.entries(), Eigen::EigenvaluesOnly);
  if (cfg.matrix_out) {
    std::ofstream f(*cfg.matrix_out);
    if (!f) throw DataError("cannot write '" + *cfg.matrix_out + "'");
    write_correlation_matrix(f, panel.assets(), c);
  }
  out << "M\tT\tmean_corr\tmin_eigenvalue\tmax_eigenvalue\n";
  tsv::write_row(out, std::vector<std::string>{
                          std::to_string(c.dim()), std::to_string(r.rows()),
                          tsv::format_number(c.mean_off_diagonal()),
                          tsv::format_number(eig.eigenvalues().minCoeff()),
                          tsv::format_number(eig.eigenvalues().maxCoeff())});
}

struct EffsizeConfig {
  std::optional<std::string> corr;
  std::optional<std::string> prices;
  std::optional<std::string> sectors;
  std::optional<std::string> index;
};

/// Columns: M, m_exact, m_uniform, m_even, m_sector, m_variance_ratio
/// (NA where not applicable).
inline void cmd_effsize(const EffsizeConfig& cfg, std::ostream& out,
                        std::ostream& log = std::cerr) {
  if (cfg.corr.has_value() == cfg.prices.has_value()) {
    throw UsageError("effsize needs exactly one of --corr or --prices");
  }
  if (cfg.index && !cfg.prices) throw UsageError("--index requires --prices");

  std::vector<std::string> assets;
  std::optional<CorrelationMatrix> c;
  std::optional<double> ratio;
  if (cfg.corr) {
    auto loaded = load_correlation_matrix_file(*cfg.corr);
    assets = std::move(loaded.assets);
    c.emplace(std::move(loaded.matrix));
  } else {
    const PricePanel panel = detail::load_panel(*cfg.prices, log);
    assets = panel.assets();
    const auto series = compute_returns(panel);
    c.emplace(estimate_matrix(series));
    if (cfg.index) {
      const auto index = detail::index_returns_for(panel, *cfg.index, log);
      ratio = m_ef_variance_ratio(index.front(), series);
    }
  }
  std::optional<SectorPartition> part;
  if (cfg.sectors) part.emplace(partition_for(assets, load_sectors_file(*cfg.sectors)));

  const EffSizeReport rep = make_report(*c, part ? &*part : nullptr, ratio);
  out << "M\tm_exact\tm_uniform\tm_even\tm_sector\tm_variance_ratio\n";
  tsv::write_row(out, std::vector<std::string>{
                          std::to_string(rep.M), tsv::format_number(rep.m_exact),
                          tsv::format_number(rep.m_uniform), tsv::format_number(rep.m_even),
                          tsv::format_number(rep.m_sector),
                          tsv::format_number(rep.m_variance_ratio)});
}

struct SubsetCurveConfig {
  std::string prices;
  std::optional<std::string> sectors;
  std::optional<std::string> sizes;  // default 2..min(30, universe)
  Index draws = 5000;
  std::uint64_t seed = 1;
};

/// Columns: M, exact, sector, even.
inline void cmd_subset_curve(const SubsetCurveConfig& cfg, std::ostream& out,
                             std::ostream& log = std::cerr) {
  if (cfg.draws < 1) throw UsageError("--draws must be at least 1");
  const PricePanel panel = detail::load_panel(cfg.prices, log);
  const Index universe = panel.asset_count();
  SubsetCurveSpec spec;
  spec.draws = cfg.draws;
  spec.seed = cfg.seed;
  if (cfg.sizes) {
    spec.sizes = parse_sizes(*cfg.sizes);
  } else {
    for (Index m = 2; m <= std::min<Index>(30, universe); ++m) spec.sizes.push_back(m);
  }
  for (Index m : spec.sizes) {
    if (m < 2 || m > universe) {
      throw UsageError("portfolio size " + std::to_string(m) + " outside [2, " +
                       std::to_string(universe) + "]");
    }
  }
  std::optional<SectorPartition> part;
  if (cfg.sectors) part.emplace(partition_for(panel.assets(), load_sectors_file(*cfg.sectors)));

  const auto curve = subset_curve(panel, spec, part ? &*part : nullptr);
  out << "M\texact\tsector\teven\n";
  for (const auto& pt : curve) {
    if (pt.excessive_skips()) {
      log << "warning: M=" << pt.M << ": " << pt.skipped << " of " << (pt.skipped + pt.evaluated)
          << " draws skipped as near-singular\n";
    }
    tsv::write_row(out, std::vector<std::string>{std::to_string(pt.M), tsv::format_number(pt.exact),
                                                 tsv::format_number(pt.sector),
                                                 tsv::format_number(pt.even)});
  }
}

struct SlidingConfig {
  std::string prices;
  Index window = 252;
  Index step = 1;
};

/// Columns: date, m_ef, R_A (m_ef is NA for near-singular windows).
inline void cmd_sliding(const SlidingConfig& cfg, std::ostream& out,
                        std::ostream& log = std::cerr) {
  const WindowSpec spec{cfg.window, cfg.step};
  try {
    spec.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const PricePanel panel = detail::load_panel(cfg.prices, log);
  const auto points = sliding_window_effsize(panel, spec);
  out << "date\tm_ef\tR_A\n";
  std::size_t gaps = 0;
  for (const auto& pt : points) {
    gaps += pt.m_ef ? 0 : 1;
    tsv::write_row(out, std::vector<std::string>{pt.end_date, tsv::format_number(pt.m_ef),
                                                 tsv::format_number(pt.average_annual_return)});
  }
  if (gaps > 0) log << "warning: " << gaps << " window(s) near-singular, reported as NA\n";
}

struct Fig1Config {
  Index M = 10;
  std::string p_list = "0.55,0.6,0.7";
  std::string c_grid = "0:1:0.05";
};

/// Columns: p, C, m_ef_approx (M/(1+(M-1)C)), m_ef_numeric, total_fraction
/// (optimal total investment of the correlated portfolio).
inline void cmd_fig1(const Fig1Config& cfg, std::ostream& out, std::ostream& = std::cerr) {
  if (cfg.M < 1 || cfg.M > kMaxEnumeratedAssets) {
    throw UsageError("--M must lie in [1, " + std::to_string(kMaxEnumeratedAssets) + "]");
  }
  const auto ps = parse_grid(cfg.p_list);
  const auto cs = parse_grid(cfg.c_grid);
  for (double p : ps) {
    if (!(p > 0.5 && p < 1.0)) throw UsageError("--p values must lie in (0.5, 1)");
  }
  detail::check_correlations(cs, "--C");

  out << "p\tC\tm_ef_approx\tm_ef_numeric\ttotal_fraction\n";
  for (double p : ps) {
    const UncorrelatedTotalFraction reference(cfg.M, p);
    for (double c : cs) {
      const double total = maximize_growth_symmetric(build_joint({cfg.M, p, c})).total_fraction;
      tsv::write_row(out, std::vector<std::string>{
                              tsv::format_number(p), tsv::format_number(c),
                              tsv::format_number(m_ef_uniform(cfg.M, c)),
                              tsv::format_number(reference.invert(total)),
                              tsv::format_number(total)});
    }
  }
}

struct Fig2Config {
  Index M = 10;
  double p = 0.55;
  double c_true = 0.2;
  std::string c_grid = "0:0.6:0.05";
};

/// Columns: C_assumed, f_assumed (per asset), G_realized.
inline void cmd_fig2(const Fig2Config& cfg, std::ostream& out, std::ostream& = std::cerr) {
  if (cfg.M < 1 || cfg.M > kMaxEnumeratedAssets) {
    throw UsageError("--M must lie in [1, " + std::to_string(kMaxEnumeratedAssets) + "]");
  }
  detail::check_probability(cfg.p, "--p");
  detail::check_correlations({cfg.c_true}, "--C-true");
  const auto cs = parse_grid(cfg.c_grid);
  detail::check_correlations(cs, "--C");

  out << "C_assumed\tf_assumed\tG_realized\n";
  for (const auto& r : misestimation_experiment(cfg.M, cfg.p, cfg.c_true, cs)) {
    tsv::write_row(out, std::vector<std::string>{tsv::format_number(r.C_assumed),
                                                 tsv::format_number(r.f_assumed),
                                                 tsv::format_number(r.G_realized)});
  }
}

struct VarianceRatioConfig {
  std::string index;
  std::string prices;
};

/// Columns: M, mean_constituent_variance, index_variance, ratio.
inline void cmd_variance_ratio(const VarianceRatioConfig& cfg, std::ostream& out,
                               std::ostream& log = std::cerr) {
  const PricePanel panel = detail::load_panel(cfg.prices, log);
  const auto series = compute_returns(panel);
  const auto index = detail::index_returns_for(panel, cfg.index, log);
  double mean_var = 0.0;
  for (const auto& s : series) mean_var += summarize(s).variance;
  mean_var /= static_cast<double>(series.size());
  const double ratio = m_ef_variance_ratio(index.front(), series);
  out << "M\tmean_constituent_variance\tindex_variance\tratio\n";
  tsv::write_row(out, std::vector<std::string>{std::to_string(series.size()),
                                               tsv::format_number(mean_var),
                                               tsv::format_number(summarize(index.front()).variance),
                                               tsv::format_number(ratio)});
}

struct SynthConfig {
  std::string blocks = "30";      // assets per sector, comma list
  std::string correlations = "0.322";  // one C per block, or one for all
  double p = 0.55;
  Index days = 1000;
  double scale = 0.01;
  std::uint64_t seed = 1;
  std::optional<std::string> sectors_out;
  std::optional<std::string> index_out;
};

/// Synthetic price panel from the hidden-asset model: one independent
/// uniform-correlation block per sector, returns scale * (+/-1). Writes the
/// price file to `out`; optional sector file and equal-weight index file.
inline void cmd_synth(const SynthConfig& cfg, std::ostream& out, std::ostream& = std::cerr) {
  std::vector<Index> sizes;
  for (double v : parse_grid(cfg.blocks)) {
    if (v < 1 || v != std::floor(v)) throw UsageError("--blocks must be positive integers");
    sizes.push_back(static_cast<Index>(v));
  }
  auto cs = parse_grid(cfg.correlations);
  if (cs.size() == 1) cs.assign(sizes.size(), cs.front());
  if (cs.size() != sizes.size()) throw UsageError("--C needs one value per block");
  detail::check_correlations(cs, "--C");
  detail::check_probability(cfg.p, "--p");
  if (cfg.days < 2) throw UsageError("--days must be at least 2");
  if (!(cfg.scale > 0.0 && cfg.scale < 1.0)) throw UsageError("--scale must lie in (0, 1)");

  Index total = 0;
  for (Index s : sizes) total += s;
  MatrixXd returns(cfg.days, total);
  std::vector<std::string> assets;
  std::vector<std::string> sector_of;
  Rng seeds(cfg.seed);
  Index col = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    returns.middleCols(col, sizes[b]) =
        sample({sizes[b], cfg.p, cs[b]}, cfg.days, seeds.next());
    for (Index k = 0; k < sizes[b]; ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "A%03ld", static_cast<long>(col + k + 1));
      assets.emplace_back(name);
      sector_of.push_back("S" + std::to_string(b + 1));
    }
    col += sizes[b];
  }
  const PricePanel panel = panel_from_returns(returns, assets, cfg.scale);
  write_prices(out, panel);
  if (cfg.sectors_out) {
    std::ofstream f(*cfg.sectors_out);
    if (!f) throw DataError("cannot write '" + *cfg.sectors_out + "'");
    f << "asset,sector\n";
    for (std::size_t i = 0; i < assets.size(); ++i) f << assets[i] << ',' << sector_of[i] << '\n';
  }
  if (cfg.index_out) {
    std::ofstream f(*cfg.index_out);
    if (!f) throw DataError("cannot write '" + *cfg.index_out + "'");
    write_prices(f, equal_weight_index(panel));
  }
}

/// Runs a command with its table buffered, so `--out` is only written on
/// success. An empty path means standard output.
template <class Config, class Command>
int run_to(const std::string& out_path, const Config& cfg, Command command,
           std::ostream& err = std::cerr) {
  std::ostringstream buffer;
  const int code = guarded([&] { command(cfg, buffer, err); }, err);
  if (code != kOk) return code;
  if (out_path.empty()) {
    std::cout << buffer.str();
    return kOk;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) {
    err << "error: cannot write '" << out_path << "'\n";
    return kData;
  }
  f << buffer.str();
  return kOk;
}

}  // namespace effsize::cli
