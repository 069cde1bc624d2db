#pragma once

// Delimited-text helpers shared by the loaders and the command outputs.
// Outputs are tab-separated with a header row; numbers carry 10 significant
// digits and missing values print as NA.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace effsize::tsv {

inline std::string format_number(double x) {
  if (std::isnan(x)) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline std::string format_number(std::optional<double> x) {
  return x ? format_number(*x) : std::string("NA");
}

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// Tab if the header line contains one, otherwise comma.
inline char detect_delimiter(std::string_view header) {
  return header.find('\t') != std::string_view::npos ? '\t' : ',';
}

/// Splits on delim and trims each field. Quoting is not supported.
inline std::vector<std::string> split(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    const auto field = line.substr(start, pos == std::string_view::npos ? pos : pos - start);
    out.emplace_back(trim(field));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

/// Whole-field decimal parse; nullopt on any trailing garbage.
inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

/// Writes one tab-separated row.
template <class Range>
void write_row(std::ostream& out, const Range& fields) {
  bool first = true;
  for (const auto& f : fields) {
    if (!first) out << '\t';
    out << f;
    first = false;
  }
  out << '\n';
}

}  // namespace effsize::tsv
