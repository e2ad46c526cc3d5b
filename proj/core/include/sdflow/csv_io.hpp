#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdflow/curve_flow.hpp"
#include "sdflow/geometry.hpp"
#include "sdflow/soliton.hpp"

namespace sdflow {

/// Malformed or truncated input. line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Shortest representation that round-trips to the same double.
std::string format_double(double x);

/// Header `x,w`, one row per sample.
void write_graph_field_csv(std::ostream& os, const GraphField& f);

/// Inverse of write_graph_field_csv. The cell length is n times the spacing
/// of the x column, which must start at 0 and be uniform. The background
/// slope is not stored in the file.
GraphField read_graph_field_csv(std::istream& is, double slope_offset);

/// Header `y,phi,psi,theta,k,w,S`.
void write_trajectory_csv(std::ostream& os, std::span<const ProfileState> samples);
std::vector<ProfileState> read_trajectory_csv(std::istream& is);

/// Header `x,y`; the closing edge is implied.
void write_curve_csv(std::ostream& os, const std::vector<Vec2>& points);
std::vector<Vec2> read_curve_csv(std::istream& is);

}  // namespace sdflow
