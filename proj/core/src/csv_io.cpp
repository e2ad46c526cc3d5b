#include "sdflow/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string_view>

namespace sdflow {

ParseError::ParseError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
      line_(line) {}

std::string format_double(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

struct Table {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> line_of;
};

Table read_table(std::istream& is, std::string_view header) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  const std::size_t cols =
      static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      if (line != header) {
        throw ParseError("expected header '" + std::string(header) + "'", lineno);
      }
      have_header = true;
      continue;
    }
    std::vector<double> row;
    row.reserve(cols);
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (true) {
      double v = 0.0;
      const auto r = std::from_chars(p, end, v);
      if (r.ec != std::errc{}) throw ParseError("bad number", lineno);
      row.push_back(v);
      p = r.ptr;
      if (p == end) break;
      if (*p != ',') throw ParseError("expected ','", lineno);
      ++p;
    }
    if (row.size() != cols) {
      throw ParseError("expected " + std::to_string(cols) + " fields, got " +
                           std::to_string(row.size()),
                       lineno);
    }
    t.rows.push_back(std::move(row));
    t.line_of.push_back(lineno);
  }
  if (!have_header) throw ParseError("empty input", 0);
  return t;
}

void write_row(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    os << format_double(v);
    first = false;
  }
  os << '\n';
}

}  // namespace

void write_graph_field_csv(std::ostream& os, const GraphField& f) {
  os << "x,w\n";
  for (std::size_t i = 0; i < f.size(); ++i) write_row(os, {f.x(i), f[i]});
}

GraphField read_graph_field_csv(std::istream& is, double slope_offset) {
  const Table t = read_table(is, "x,w");
  const std::size_t n = t.rows.size();
  if (n < GraphField::kMinSamples) {
    throw ParseError("grid too coarse (" + std::to_string(n) + " rows)", 0);
  }
  if (t.rows[0][0] != 0.0) throw ParseError("x must start at 0", t.line_of[0]);
  const double h = t.rows[1][0];
  if (!(h > 0.0)) throw ParseError("x must be increasing", t.line_of[1]);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(t.rows[i][0] - static_cast<double>(i) * h) > 1e-9 * h * static_cast<double>(n)) {
      throw ParseError("x must be uniformly spaced", t.line_of[i]);
    }
    w[i] = t.rows[i][1];
  }
  try {
    return GraphField(h * static_cast<double>(n), slope_offset, std::move(w));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0);
  }
}

void write_trajectory_csv(std::ostream& os, std::span<const ProfileState> samples) {
  os << "y,phi,psi,theta,k,w,S\n";
  for (const auto& s : samples) write_row(os, {s.y, s.phi, s.psi, s.theta(), s.k, s.w, s.S});
}

std::vector<ProfileState> read_trajectory_csv(std::istream& is) {
  const Table t = read_table(is, "y,phi,psi,theta,k,w,S");
  std::vector<ProfileState> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    ProfileState s{r[0], r[1], r[2], r[4], r[5], r[6]};
    if (!s.finite()) throw ParseError("non-finite state", t.line_of[i]);
    out.push_back(s);
  }
  return out;
}

void write_curve_csv(std::ostream& os, const std::vector<Vec2>& points) {
  os << "x,y\n";
  for (const Vec2& p : points) write_row(os, {p.x, p.y});
}

std::vector<Vec2> read_curve_csv(std::istream& is) {
  const Table t = read_table(is, "x,y");
  std::vector<Vec2> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) out.push_back({r[0], r[1]});
  return out;
}

}  // namespace sdflow
