#pragma once

// Text formats.
//   truth table:  line 1 "n=<k>", line 2 the 2^k entries in PointIndex order,
//                 space separated (+-1 or reals).
//   spectrum JSON: {"0x3": 1.0, ...}, nonzero coefficients keyed by hex mask.
//   spectrum CSV:  header "mask,coefficient", one row per mask.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "resil/error.hpp"
#include "resil/fourier.hpp"

namespace resil::io {

/// Shortest decimal that round-trips to the same double.
inline std::string format_real(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string hex_mask(SubsetMask s) {
  std::ostringstream os;
  os << "0x" << std::hex << s;
  return os.str();
}

inline SubsetMask parse_mask(const std::string& text) {
  SubsetMask v = 0;
  const bool hex = text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X');
  const char* b = text.data() + (hex ? 2 : 0);
  const char* e = text.data() + text.size();
  const auto r = std::from_chars(b, e, v, hex ? 16 : 10);
  require(r.ec == std::errc() && r.ptr == e && b != e, Errc::parse_error, "bad subset mask '" + text + "'");
  return v;
}

inline void write_truth_table(std::ostream& os, int n, std::span<const double> values) {
  require(values.size() == table_size(n), Errc::dimension_mismatch, "table length must be 2^n");
  os << "n=" << n << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << ' ';
    os << format_real(values[i]);
  }
  os << '\n';
}

inline void write_truth_table(std::ostream& os, const BoundedFunction& f) {
  write_truth_table(os, f.dim(), f.values());
}

inline void write_truth_table(std::ostream& os, const BooleanFunction& f) {
  write_truth_table(os, BoundedFunction(f));
}

inline BoundedFunction read_truth_table(std::istream& is) {
  std::string header;
  require(bool(std::getline(is, header)), Errc::parse_error, "missing 'n=<k>' header");
  while (!header.empty() && (header.back() == '\r' || header.back() == ' ')) header.pop_back();
  require(header.rfind("n=", 0) == 0, Errc::parse_error, "header must read 'n=<k>'");
  int n = -1;
  const char* b = header.data() + 2;
  const char* e = header.data() + header.size();
  const auto r = std::from_chars(b, e, n);
  require(r.ec == std::errc() && r.ptr == e && n >= 0, Errc::parse_error, "bad dimension in header");
  check_dimension(n);
  std::string line;
  require(bool(std::getline(is, line)), Errc::parse_error, "missing table line");
  std::istringstream ls(line);
  std::vector<double> values;
  values.reserve(table_size(n));
  std::string tok;
  while (ls >> tok) {
    double v = 0.0;
    const auto rr = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    require(rr.ec == std::errc() && rr.ptr == tok.data() + tok.size(), Errc::parse_error,
            "bad table entry '" + tok + "'");
    values.push_back(v);
  }
  require(values.size() == table_size(n), Errc::parse_error,
          "expected " + std::to_string(table_size(n)) + " entries, found " + std::to_string(values.size()));
  return BoundedFunction(n, std::move(values));
}

inline BoundedFunction load_truth_table(const std::string& path) {
  std::ifstream in(path);
  require(bool(in), Errc::parse_error, "cannot open '" + path + "'");
  return read_truth_table(in);
}

inline nlohmann::json spectrum_json(const Spectrum& s, double zero_tol = 0.0) {
  nlohmann::json j = nlohmann::json::object();
  for (SubsetMask m = 0; m < s.size(); ++m)
    if (std::abs(s[m]) > zero_tol) j[hex_mask(m)] = s[m];
  return j;
}

inline Spectrum spectrum_from_json(int n, const nlohmann::json& j) {
  require(j.is_object(), Errc::parse_error, "spectrum JSON must be an object");
  check_dimension(n);
  std::vector<double> c(table_size(n), 0.0);
  for (const auto& [key, val] : j.items()) {
    const SubsetMask m = parse_mask(key);
    require(m < c.size(), Errc::parse_error, "mask " + key + " outside dimension");
    require(val.is_number(), Errc::parse_error, "coefficient for " + key + " is not a number");
    c[m] = val.get<double>();
  }
  return Spectrum(n, std::move(c));
}

inline void write_spectrum_csv(std::ostream& os, const Spectrum& s) {
  os << "mask,coefficient\n";
  for (SubsetMask m = 0; m < s.size(); ++m) os << hex_mask(m) << ',' << format_real(s[m]) << '\n';
}

}  // namespace resil::io
