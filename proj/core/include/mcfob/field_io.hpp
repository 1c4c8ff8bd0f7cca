#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "mcfob/grid.hpp"

namespace mcfob {

struct Snapshot {
  ScalarField field;
  double t = 0.0;
};

/// Writes the text snapshot format:
///   # d=<d> L=<L> n=<n> t=<time>
/// followed by n lines (d=1: one value each; d=2: n comma-separated values),
/// row-major, every value in 17-significant-digit scientific notation.
void write_snapshot(std::ostream& out, const ScalarField& field, double t);
void write_snapshot_file(const std::string& path, const ScalarField& field, double t);

/// Parses the snapshot format. Throws IoError on malformed input.
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot_file(const std::string& path);

/// Shortest representation that round-trips, '.' decimal separator
/// independent of the global locale. Infinities print as inf / -inf.
std::string format_double(double value);

/// 17 significant digits, scientific notation.
std::string format_scientific(double value);

/// Locale-independent strict parse of a whole token. Throws
/// std::invalid_argument on failure.
double parse_double(std::string_view token);

}  // namespace mcfob
