#pragma once

// Price panels: loading, simple returns, sliding-window effective size and
// random-subset curves.
//
// Price file: header `date,ASSET1,ASSET2,...` (comma or tab), one row per
// trading day, ISO-8601 dates strictly increasing, decimal prices, empty
// cell = missing. Assets missing any quote are dropped and reported.
//
// Sector file: header `asset,sector`, one asset per row.

#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "effsize/corrmat.hpp"
#include "effsize/effective_size.hpp"
#include "effsize/errors.hpp"
#include "effsize/random.hpp"
#include "effsize/tsv.hpp"

namespace effsize {

inline constexpr double kTradingDaysPerYear = 252.0;

/// Whether s is a valid calendar date written YYYY-MM-DD.
inline bool is_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  auto num = [&](std::size_t at, std::size_t len) {
    int v = 0;
    for (std::size_t i = at; i < at + len; ++i) v = v * 10 + (s[i] - '0');
    return v;
  };
  const std::chrono::year_month_day ymd{std::chrono::year{num(0, 4)},
                                        std::chrono::month{static_cast<unsigned>(num(5, 2))},
                                        std::chrono::day{static_cast<unsigned>(num(8, 2))}};
  return ymd.ok();
}

/// Adjusted closing prices, one row per date and one column per asset.
class PricePanel {
public:
  PricePanel(std::vector<std::string> dates, std::vector<std::string> assets, MatrixXd prices)
      : dates_(std::move(dates)), assets_(std::move(assets)), prices_(std::move(prices)) {
    if (prices_.rows() != static_cast<Index>(dates_.size()) ||
        prices_.cols() != static_cast<Index>(assets_.size())) {
      throw InputShapeError("price panel shape does not match its labels");
    }
    for (std::size_t t = 0; t < dates_.size(); ++t) {
      if (!is_iso_date(dates_[t])) throw DataError("invalid date '" + dates_[t] + "'");
      if (t > 0 && !(dates_[t - 1] < dates_[t])) {
        throw DataError("dates not strictly increasing at '" + dates_[t] + "'");
      }
    }
    for (Index t = 0; t < prices_.rows(); ++t) {
      for (Index j = 0; j < prices_.cols(); ++j) {
        if (!(prices_(t, j) > 0.0) || !std::isfinite(prices_(t, j))) {
          throw DataError("nonpositive price for " + assets_[static_cast<std::size_t>(j)] +
                          " on " + dates_[static_cast<std::size_t>(t)]);
        }
      }
    }
  }

  const std::vector<std::string>& dates() const noexcept { return dates_; }
  const std::vector<std::string>& assets() const noexcept { return assets_; }
  const MatrixXd& prices() const noexcept { return prices_; }
  Index date_count() const noexcept { return prices_.rows(); }
  Index asset_count() const noexcept { return prices_.cols(); }

private:
  std::vector<std::string> dates_;
  std::vector<std::string> assets_;
  MatrixXd prices_;
};

struct PriceLoad {
  PricePanel panel;
  std::vector<std::string> dropped;
};

inline PriceLoad load_prices(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::vector<std::string>> header;
  char delim = ',';
  while (!header && std::getline(in, line)) {
    ++lineno;
    if (tsv::trim(line).empty()) continue;
    delim = tsv::detect_delimiter(line);
    header = tsv::split(line, delim);
  }
  if (!header) throw ParseError("price file is empty", lineno);
  if (header->size() < 2) throw ParseError("price header has no asset columns", lineno);

  const std::vector<std::string> names(header->begin() + 1, header->end());
  std::set<std::string> unique;
  for (const auto& n : names) {
    if (n.empty()) throw ParseError("empty asset name in header", lineno);
    if (!unique.insert(n).second) throw ParseError("duplicate asset '" + n + "'", lineno);
  }

  std::vector<std::string> dates;
  std::vector<std::vector<double>> rows;  // NaN marks a missing quote
  while (std::getline(in, line)) {
    ++lineno;
    if (tsv::trim(line).empty()) continue;
    auto fields = tsv::split(line, delim);
    if (fields.size() != header->size()) {
      throw ParseError("expected " + std::to_string(header->size()) + " fields, found " +
                           std::to_string(fields.size()),
                       lineno);
    }
    if (!is_iso_date(fields[0])) throw ParseError("invalid date '" + fields[0] + "'", lineno);
    if (!dates.empty() && !(dates.back() < fields[0])) {
      throw ParseError("dates not strictly increasing at '" + fields[0] + "'", lineno);
    }
    std::vector<double> row(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
      const auto& cell = fields[j + 1];
      if (cell.empty()) {
        row[j] = NAN;
        continue;
      }
      const auto v = tsv::parse_double(cell);
      if (!v || !std::isfinite(*v)) {
        throw ParseError("unparseable price '" + cell + "' for " + names[j], lineno);
      }
      if (*v <= 0.0) {
        throw DataError("line " + std::to_string(lineno) + ": nonpositive price " + cell +
                        " for " + names[j]);
      }
      row[j] = *v;
    }
    dates.push_back(fields[0]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("price file has a header but no data rows", lineno);

  std::vector<std::size_t> keep;
  std::vector<std::string> dropped;
  for (std::size_t j = 0; j < names.size(); ++j) {
    const bool complete =
        std::none_of(rows.begin(), rows.end(), [&](const auto& r) { return std::isnan(r[j]); });
    (complete ? keep.push_back(j) : dropped.push_back(names[j]));
  }
  if (keep.empty()) throw DataError("no asset is quoted on every date");

  MatrixXd prices(static_cast<Index>(rows.size()), static_cast<Index>(keep.size()));
  std::vector<std::string> kept_names;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    kept_names.push_back(names[keep[k]]);
    for (std::size_t t = 0; t < rows.size(); ++t) {
      prices(static_cast<Index>(t), static_cast<Index>(k)) = rows[t][keep[k]];
    }
  }
  return {PricePanel(std::move(dates), std::move(kept_names), std::move(prices)),
          std::move(dropped)};
}

inline PriceLoad load_prices_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open price file '" + path + "'");
  return load_prices(in);
}

inline void write_prices(std::ostream& out, const PricePanel& panel) {
  out << "date";
  for (const auto& a : panel.assets()) out << ',' << a;
  out << '\n';
  for (Index t = 0; t < panel.date_count(); ++t) {
    out << panel.dates()[static_cast<std::size_t>(t)];
    for (Index j = 0; j < panel.asset_count(); ++j) {
      out << ',' << tsv::format_number(panel.prices()(t, j));
    }
    out << '\n';
  }
}

/// asset -> sector label.
inline std::map<std::string, std::string> load_sectors(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  bool seen_header = false;
  char delim = ',';
  std::map<std::string, std::string> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (tsv::trim(line).empty()) continue;
    if (!seen_header) {
      delim = tsv::detect_delimiter(line);
      if (tsv::split(line, delim).size() != 2) {
        throw ParseError("sector header must have two columns (asset,sector)", lineno);
      }
      seen_header = true;
      continue;
    }
    const auto fields = tsv::split(line, delim);
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw ParseError("expected 'asset,sector'", lineno);
    }
    if (!out.emplace(fields[0], fields[1]).second) {
      throw ParseError("asset '" + fields[0] + "' listed twice", lineno);
    }
  }
  if (!seen_header) throw ParseError("sector file is empty", lineno);
  return out;
}

inline std::map<std::string, std::string> load_sectors_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open sector file '" + path + "'");
  return load_sectors(in);
}

/// Partition of the given assets; every asset must have a sector.
inline SectorPartition partition_for(const std::vector<std::string>& assets,
                                     const std::map<std::string, std::string>& sectors) {
  std::vector<std::string> labels;
  labels.reserve(assets.size());
  for (const auto& a : assets) {
    const auto it = sectors.find(a);
    if (it == sectors.end()) throw InputShapeError("asset '" + a + "' has no sector");
    labels.push_back(it->second);
  }
  return SectorPartition(labels);
}

/// (T-1) x M matrix of simple returns (w(t+1) - w(t)) / w(t).
inline MatrixXd returns_matrix(const PricePanel& panel) {
  if (panel.date_count() < 2) {
    throw InputShapeError("returns need at least two dates");
  }
  const Index t = panel.date_count() - 1;
  const MatrixXd& w = panel.prices();
  return (w.bottomRows(t) - w.topRows(t)).cwiseQuotient(w.topRows(t));
}

inline std::vector<ReturnSeries> compute_returns(const PricePanel& panel) {
  const MatrixXd r = returns_matrix(panel);
  std::vector<ReturnSeries> out;
  out.reserve(static_cast<std::size_t>(r.cols()));
  for (Index j = 0; j < r.cols(); ++j) {
    out.emplace_back(panel.assets()[static_cast<std::size_t>(j)],
                     std::vector<double>(r.col(j).data(), r.col(j).data() + r.rows()));
  }
  return out;
}

/// Consecutive weekdays starting at start (YYYY-MM-DD), as ISO strings.
inline std::vector<std::string> weekday_calendar(Index count, const std::string& start = "2000-01-03") {
  using namespace std::chrono;
  if (!is_iso_date(start)) throw DomainError("invalid start date '" + start + "'");
  const year_month_day first{year{std::stoi(start.substr(0, 4))},
                             month{static_cast<unsigned>(std::stoi(start.substr(5, 2)))},
                             day{static_cast<unsigned>(std::stoi(start.substr(8, 2)))}};
  sys_days d{first};
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<Index>(out.size()) < count) {
    const weekday wd{d};
    if (wd != Saturday && wd != Sunday) {
      const year_month_day ymd{d};
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                    static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
      out.emplace_back(buf);
    }
    d += days{1};
  }
  return out;
}

/// Price panel whose simple returns are scale * returns (row t = period t),
/// starting every asset at start_price on a weekday calendar.
inline PricePanel panel_from_returns(const MatrixXd& returns, std::vector<std::string> assets,
                                     double scale = 0.01, double start_price = 100.0,
                                     const std::string& start_date = "2000-01-03") {
  if (static_cast<Index>(assets.size()) != returns.cols()) {
    throw InputShapeError("one label per return column required");
  }
  MatrixXd prices(returns.rows() + 1, returns.cols());
  prices.row(0).setConstant(start_price);
  for (Index t = 0; t < returns.rows(); ++t) {
    prices.row(t + 1) = prices.row(t).cwiseProduct((1.0 + scale * returns.row(t).array()).matrix());
  }
  auto dates = weekday_calendar(prices.rows(), start_date);
  return PricePanel(std::move(dates), std::move(assets), std::move(prices));
}

/// Equal-weight index: each period's return is the mean constituent return.
inline PricePanel equal_weight_index(const PricePanel& panel, const std::string& name = "INDEX",
                                     double start_level = 100.0) {
  const MatrixXd r = returns_matrix(panel);
  MatrixXd level(panel.date_count(), 1);
  level(0, 0) = start_level;
  for (Index t = 0; t < r.rows(); ++t) level(t + 1, 0) = level(t, 0) * (1.0 + r.row(t).mean());
  return PricePanel(panel.dates(), {name}, std::move(level));
}

// ---------------------------------------------------------------------------
// Sliding windows

struct WindowSpec {
  Index length = 252;
  Index step = 1;

  void validate() const {
    if (length < 30) throw DomainError("window length must be at least 30 trading days");
    if (step < 1) throw DomainError("window step must be at least 1");
  }
};

struct WindowPoint {
  std::string end_date;
  std::optional<double> m_ef;  // empty when the window's matrix is near-singular
  double average_annual_return = 0.0;
};

/// Window k covers returns [k*step, k*step + length); its end date is the
/// date of the last return in it. floor((T - length)/step) + 1 windows for
/// T returns.
inline std::vector<WindowPoint> sliding_window_effsize(const PricePanel& panel,
                                                       const WindowSpec& spec,
                                                       double periods_per_year = kTradingDaysPerYear) {
  spec.validate();
  if (panel.asset_count() < 2) throw InputShapeError("sliding windows need at least two assets");
  const MatrixXd r = returns_matrix(panel);
  const Index t = r.rows();
  if (t < spec.length) {
    throw InputShapeError("window of " + std::to_string(spec.length) + " returns exceeds the " +
                          std::to_string(t) + " available");
  }
  const Index windows = (t - spec.length) / spec.step + 1;
  std::vector<WindowPoint> out;
  out.reserve(static_cast<std::size_t>(windows));
  for (Index k = 0; k < windows; ++k) {
    const Index begin = k * spec.step;
    const MatrixXd w = r.middleRows(begin, spec.length);
    WindowPoint pt;
    pt.end_date = panel.dates()[static_cast<std::size_t>(begin + spec.length)];
    pt.average_annual_return = w.colwise().mean().mean() * periods_per_year;
    try {
      pt.m_ef = m_ef_exact(invert(estimate_matrix(w)));
    } catch (const NearSingularError&) {
      pt.m_ef.reset();
    }
    out.push_back(std::move(pt));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random-subset curves

struct SubsetCurveSpec {
  std::vector<Index> sizes;
  Index draws = 5000;
  std::uint64_t seed = 1;

  void validate(Index universe) const {
    if (draws < 1) throw DomainError("draws must be at least 1");
    if (sizes.empty()) throw DomainError("no portfolio sizes requested");
    for (Index m : sizes) {
      if (m < 2 || m > universe) {
        throw DomainError("portfolio size " + std::to_string(m) + " outside [2, " +
                          std::to_string(universe) + "]");
      }
    }
  }
};

struct SubsetCurvePoint {
  Index M = 0;
  double exact = NAN;
  std::optional<double> sector;
  double even = NAN;
  Index evaluated = 0;
  Index skipped = 0;

  /// More than 1% of draws were numerically unusable.
  bool excessive_skips() const { return skipped * 100 > evaluated + skipped; }
};

/// Averages of exact, sector and even effective sizes over random subsets
/// of the universe. One RNG stream serves all sizes in order, so output is
/// a function of (matrix, spec, partition) alone. Draws whose sub-matrix or
/// reduced sector matrix is near-singular are skipped for all estimates.
inline std::vector<SubsetCurvePoint> subset_curve(const CorrelationMatrix& universe,
                                                  const SubsetCurveSpec& spec,
                                                  const SectorPartition* partition = nullptr) {
  spec.validate(universe.dim());
  if (partition != nullptr && partition->asset_count() != universe.dim()) {
    throw InputShapeError("sector partition does not cover the universe");
  }
  Rng rng(spec.seed);
  std::vector<SubsetCurvePoint> out;
  for (Index m : spec.sizes) {
    // The full universe is the only subset of its own size.
    const Index draws = m == universe.dim() ? 1 : spec.draws;
    SubsetCurvePoint pt;
    pt.M = m;
    double exact = 0.0, sector = 0.0, even = 0.0;
    for (Index d = 0; d < draws; ++d) {
      const std::vector<Index> idx = rng.subset(universe.dim(), m);
      try {
        const CorrelationMatrix sub = universe.submatrix(idx);
        const double e = m_ef_exact(invert(sub));
        const double s = partition ? m_ef_sector(sub, partition->restrict_to(idx)) : 0.0;
        const double v = m_ef_even(sub);
        exact += e;
        sector += s;
        even += v;
        ++pt.evaluated;
      } catch (const NearSingularError&) {
        ++pt.skipped;
      } catch (const DomainError&) {
        ++pt.skipped;
      }
    }
    if (pt.evaluated > 0) {
      const double n = static_cast<double>(pt.evaluated);
      pt.exact = exact / n;
      pt.even = even / n;
      if (partition) pt.sector = sector / n;
    }
    out.push_back(pt);
  }
  return out;
}

inline std::vector<SubsetCurvePoint> subset_curve(const PricePanel& panel,
                                                  const SubsetCurveSpec& spec,
                                                  const SectorPartition* partition = nullptr) {
  return subset_curve(estimate_matrix(returns_matrix(panel)), spec, partition);
}

// ---------------------------------------------------------------------------
// Correlation matrix files: header `asset<TAB>A1<TAB>A2...`, then one row
// per asset, label first.

inline void write_correlation_matrix(std::ostream& out, const std::vector<std::string>& assets,
                                     const CorrelationMatrix& c) {
  out << "asset";
  for (const auto& a : assets) out << '\t' << a;
  out << '\n';
  for (Index i = 0; i < c.dim(); ++i) {
    out << assets[static_cast<std::size_t>(i)];
    for (Index j = 0; j < c.dim(); ++j) out << '\t' << tsv::format_number(c(i, j));
    out << '\n';
  }
}

struct LabeledCorrelation {
  std::vector<std::string> assets;
  CorrelationMatrix matrix;
};

inline LabeledCorrelation load_correlation_matrix(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  char delim = '\t';
  while (header.empty() && std::getline(in, line)) {
    ++lineno;
    if (tsv::trim(line).empty()) continue;
    delim = tsv::detect_delimiter(line);
    header = tsv::split(line, delim);
  }
  if (header.size() < 2) throw ParseError("correlation file has no asset columns", lineno);
  const std::vector<std::string> assets(header.begin() + 1, header.end());
  const auto n = static_cast<Index>(assets.size());
  MatrixXd e(n, n);
  Index row = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (tsv::trim(line).empty()) continue;
    const auto fields = tsv::split(line, delim);
    if (row >= n) throw ParseError("more rows than assets", lineno);
    if (static_cast<Index>(fields.size()) != n + 1) {
      throw ParseError("expected " + std::to_string(n + 1) + " fields", lineno);
    }
    if (fields[0] != assets[static_cast<std::size_t>(row)]) {
      throw ParseError("row label '" + fields[0] + "' does not match column '" +
                           assets[static_cast<std::size_t>(row)] + "'",
                       lineno);
    }
    for (Index j = 0; j < n; ++j) {
      const auto v = tsv::parse_double(fields[static_cast<std::size_t>(j) + 1]);
      if (!v) throw ParseError("unparseable correlation '" + fields[j + 1] + "'", lineno);
      e(row, j) = *v;
    }
    ++row;
  }
  if (row != n) throw ParseError("expected " + std::to_string(n) + " matrix rows", lineno);
  try {
    return {assets, CorrelationMatrix(std::move(e))};
  } catch (const DomainError& err) {
    throw DataError(std::string("invalid correlation matrix: ") + err.what());
  }
}

inline LabeledCorrelation load_correlation_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open correlation file '" + path + "'");
  return load_correlation_matrix(in);
}

}  // namespace effsize
