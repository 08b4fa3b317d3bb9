#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "topoae/core/errors.hpp"
#include "topoae/core/point_cloud.hpp"

namespace topoae::io {

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t p = line.find(sep, start);
    out.push_back(trim(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start)));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

inline bool parse_number(std::string_view f, double& v) {
  if (!f.empty() && f.front() == '+') f.remove_prefix(1);
  const auto r = std::from_chars(f.data(), f.data() + f.size(), v);
  return r.ec == std::errc() && r.ptr == f.data() + f.size();
}

}  // namespace detail

/// Parses comma-separated numeric rows. A first line with any non-numeric
/// field is taken as a header. Blank lines and lines starting with '#' are
/// skipped.
inline PointCloud parse_csv(std::istream& in, std::vector<std::string>* header = nullptr) {
  std::vector<double> coords;
  std::size_t dim = 0, line_no = 0, rows = 0;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const char sep = t.find(',') != std::string_view::npos ? ',' : t.find(';') != std::string_view::npos ? ';' : ' ';
    auto fields = detail::split(t, sep);
    if (sep == ' ') std::erase_if(fields, [](std::string_view f) { return f.empty(); });
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t k = 0; k < fields.size() && numeric; ++k) numeric = detail::parse_number(fields[k], row[k]);
    if (first) {
      first = false;
      if (!numeric) {
        if (header)
          for (auto f : fields) header->emplace_back(f);
        continue;
      }
    }
    if (!numeric) throw ValidationError("csv line " + std::to_string(line_no) + ": non-numeric field");
    if (dim == 0) dim = row.size();
    if (row.size() != dim)
      throw ValidationError("csv line " + std::to_string(line_no) + ": expected " + std::to_string(dim) + " fields, got " +
                            std::to_string(row.size()));
    coords.insert(coords.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows == 0) throw ValidationError("csv contains no data rows");
  return PointCloud(dim, std::move(coords));
}

inline PointCloud read_csv(const std::string& path, std::vector<std::string>* header = nullptr) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return parse_csv(in, header);
}

inline void write_csv(std::ostream& out, const PointCloud& c, const std::vector<std::string>& header = {}) {
  for (std::size_t k = 0; k < c.dim(); ++k) {
    if (k) out << ',';
    out << (k < header.size() ? header[k] : "x" + std::to_string(k));
  }
  out << '\n';
  for (Index i = 0; i < c.size(); ++i) {
    for (std::size_t k = 0; k < c.dim(); ++k) {
      if (k) out << ',';
      out << format_double(c(i, k));
    }
    out << '\n';
  }
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

inline void write_csv(const std::string& path, const PointCloud& c, const std::vector<std::string>& header = {}) {
  std::ostringstream os;
  write_csv(os, c, header);
  write_file(path, os.str());
}

}  // namespace topoae::io
