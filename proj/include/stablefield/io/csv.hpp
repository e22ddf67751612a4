#ifndef STABLEFIELD_IO_CSV_HPP
#define STABLEFIELD_IO_CSV_HPP

#include <charconv>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "stablefield/sas_core.hpp"

namespace stablefield::io {

/// Shortest round-trip decimal form; locale-independent.
inline std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, end);
}

/// RFC 4180 quoting: fields containing , " CR or LF are quoted, quotes doubled.
inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) os_ << ',';
      os_ << csv_field(fields[i]);
    }
    os_ << "\r\n";
  }

 private:
  std::ostream& os_;
};

/// Header t1..td,value then one row per window point in row-major order.
inline void write_realization_csv(std::ostream& os, const FieldRealization& x) {
  CsvWriter w(os);
  std::vector<std::string> header;
  for (std::size_t k = 0; k < x.dim(); ++k) header.push_back("t" + std::to_string(k + 1));
  header.emplace_back("value");
  w.row(header);
  for (std::size_t i = 0; i < x.values.size(); ++i) {
    const auto t = x.window.point_at(i);
    std::vector<std::string> r;
    for (std::size_t k = 0; k < t.dim(); ++k) r.push_back(std::to_string(t[k]));
    r.push_back(format_double(x.values[i]));
    w.row(r);
  }
}

}  // namespace stablefield::io

#endif  // STABLEFIELD_IO_CSV_HPP
