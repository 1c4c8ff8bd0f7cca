#include "mcfob/field_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "mcfob/error.hpp"

namespace mcfob {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Value of `key=` inside the header line.
std::string_view header_value(std::string_view header, std::string_view key) {
  std::size_t pos = 0;
  while ((pos = header.find(key, pos)) != std::string_view::npos) {
    const bool at_word_start = pos == 0 || header[pos - 1] == ' ' || header[pos - 1] == '#';
    if (at_word_start && pos + key.size() < header.size() && header[pos + key.size()] == '=') {
      const std::size_t start = pos + key.size() + 1;
      const std::size_t end = header.find(' ', start);
      return header.substr(start, end == std::string_view::npos ? end : end - start);
    }
    pos += key.size();
  }
  throw IoError("snapshot header lacks '" + std::string(key) + "='");
}

int parse_int(std::string_view token) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw IoError("snapshot header: bad integer '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_scientific(double value) {
  if (!std::isfinite(value)) return format_double(value);
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific, 16);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_double(std::string_view token) {
  token = trim(token);
  if (token == "inf" || token == "+inf") return INFINITY;
  if (token == "-inf") return -INFINITY;
  std::string_view digits = token;
  if (!digits.empty() && digits.front() == '+') digits.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw std::invalid_argument("not a number: '" + std::string(token) + "'");
  }
  return value;
}

void write_snapshot(std::ostream& out, const ScalarField& field, double t) {
  const PeriodicGrid& g = field.grid();
  out << "# d=" << std::to_string(g.dim()) << " L=" << format_double(g.length())
      << " n=" << std::to_string(g.samples())
      << " t=" << format_double(t) << '\n';
  const std::size_t n = static_cast<std::size_t>(g.samples());
  if (g.dim() == 1) {
    for (std::size_t k = 0; k < n; ++k) out << format_scientific(field[k]) << '\n';
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j) out << ',';
      out << format_scientific(field[i * n + j]);
    }
    out << '\n';
  }
}

void write_snapshot_file(const std::string& path, const ScalarField& field, double t) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_snapshot(out, field, t);
  if (!out) throw IoError("write failed for '" + path + "'");
}

Snapshot read_snapshot(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("#", 0) != 0) {
    throw IoError("snapshot: missing '# d=... L=... n=... t=...' header");
  }
  const int d = parse_int(header_value(header, "d"));
  const int n = parse_int(header_value(header, "n"));
  double length = 0.0;
  double t = 0.0;
  try {
    length = parse_double(header_value(header, "L"));
    t = parse_double(header_value(header, "t"));
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("snapshot header: ") + e.what());
  }

  PeriodicGrid grid = [&] {
    try {
      return PeriodicGrid(d, length, n);
    } catch (const ContractViolation& e) {
      throw IoError(std::string("snapshot header: ") + e.what());
    }
  }();

  std::vector<double> values;
  values.reserve(grid.size());
  const std::size_t per_line = d == 1 ? 1 : static_cast<std::size_t>(n);
  std::string line;
  for (int row = 0; row < n; ++row) {
    if (!std::getline(in, line)) {
      throw IoError("snapshot: expected " + std::to_string(n) + " data lines, got " +
                    std::to_string(row));
    }
    std::size_t count = 0;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      const std::string_view token = rest.substr(0, comma);
      try {
        values.push_back(parse_double(token));
      } catch (const std::invalid_argument& e) {
        throw IoError("snapshot line " + std::to_string(row + 2) + ": " + e.what());
      }
      ++count;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (count != per_line) {
      throw IoError("snapshot line " + std::to_string(row + 2) + ": expected " +
                    std::to_string(per_line) + " values, got " + std::to_string(count));
    }
  }
  try {
    return Snapshot{ScalarField(grid, std::move(values)), t};
  } catch (const ContractViolation& e) {
    throw IoError(std::string("snapshot: ") + e.what());
  }
}

Snapshot read_snapshot_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open snapshot '" + path + "'");
  return read_snapshot(in);
}

}  // namespace mcfob
