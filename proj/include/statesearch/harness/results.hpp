#pragma once

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace statesearch::harness {

struct ResultsRow {
  std::string method;
  std::string dataset;
  std::int64_t checkpoint_or_year = 0;
  double mean_value = 0.0;
  double pct_upper = 0.0;
  std::int64_t replications = 0;
  double sd = 0.0;

  bool operator==(const ResultsRow&) const = default;
};

inline constexpr std::string_view kResultsHeader = "method,dataset,checkpoint_or_year,mean_value,pct_upper,replications,sd";

namespace detail {

// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, p);
}

template <class T>
T parse_field(std::string_view s, std::size_t line) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) {
    throw std::invalid_argument("line " + std::to_string(line) + ": malformed field '" + std::string(s) + "'");
  }
  return v;
}

inline void check_text_field(const std::string& s) {
  if (s.find_first_of(",\n\r\"") != std::string::npos) {
    throw std::invalid_argument("results text fields may not contain commas, quotes or newlines");
  }
}

}  // namespace detail

class ResultsTable {
 public:
  void add(ResultsRow row) {
    detail::check_text_field(row.method);
    detail::check_text_field(row.dataset);
    rows_.push_back(std::move(row));
  }

  const std::vector<ResultsRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  /// First row with this method, dataset and checkpoint, or null.
  const ResultsRow* find(std::string_view method, std::string_view dataset, std::int64_t checkpoint) const {
    for (const auto& r : rows_) {
      if (r.method == method && r.dataset == dataset && r.checkpoint_or_year == checkpoint) return &r;
    }
    return nullptr;
  }

  void write_csv(std::ostream& os) const {
    os << kResultsHeader << '\n';
    for (const auto& r : rows_) {
      os << r.method << ',' << r.dataset << ',' << r.checkpoint_or_year << ',' << detail::format_number(r.mean_value)
         << ',' << detail::format_number(r.pct_upper) << ',' << r.replications << ','
         << detail::format_number(r.sd) << '\n';
    }
  }

  std::string to_csv() const {
    std::ostringstream os;
    write_csv(os);
    return os.str();
  }

  static ResultsTable read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kResultsHeader) {
      throw std::invalid_argument("line 1: expected results header");
    }
    ResultsTable t;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.empty()) continue;
      std::vector<std::string_view> f;
      std::string_view rest = line;
      for (;;) {
        const auto c = rest.find(',');
        f.push_back(rest.substr(0, c));
        if (c == std::string_view::npos) break;
        rest.remove_prefix(c + 1);
      }
      if (f.size() != 7) throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 7 fields");
      t.add({std::string(f[0]), std::string(f[1]), detail::parse_field<std::int64_t>(f[2], lineno),
             detail::parse_field<double>(f[3], lineno), detail::parse_field<double>(f[4], lineno),
             detail::parse_field<std::int64_t>(f[5], lineno), detail::parse_field<double>(f[6], lineno)});
    }
    return t;
  }

  static ResultsTable from_csv(const std::string& text) {
    std::istringstream is(text);
    return read_csv(is);
  }

  bool operator==(const ResultsTable&) const = default;

 private:
  std::vector<ResultsRow> rows_;
};

}  // namespace statesearch::harness
