#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "jolt/errors.hpp"
#include "jolt/geometry.hpp"

namespace jolt {

struct PointSet {
  std::string name;
  std::vector<Point2> points;
  std::optional<double> known_optimum;

  std::size_t size() const { return points.size(); }
};

// Reference closed-tour lengths (Euclidean) of the bundled benchmark instances.
inline std::optional<double> known_optimum(std::string_view name) {
  if (name == "att48") return 33523.71;
  if (name == "eil101") return 642.30;
  if (name == "tsp225") return 3859.00;
  return std::nullopt;
}

// Throws InvalidPermutationError unless `order` is a permutation of 0..n-1.
inline void validate_permutation(std::span<const std::size_t> order, std::size_t n) {
  if (order.size() != n) {
    throw InvalidPermutationError("order has " + std::to_string(order.size()) + " entries, expected " +
                                  std::to_string(n));
  }
  std::vector<char> seen(n, 0);
  for (std::size_t idx : order) {
    if (idx >= n) throw InvalidPermutationError("index " + std::to_string(idx) + " out of range");
    if (seen[idx]) throw InvalidPermutationError("index " + std::to_string(idx) + " repeated");
    seen[idx] = 1;
  }
}

// Closed tour: the last point connects back to the first.
inline double tour_length(std::span<const Point2> points, std::span<const std::size_t> order) {
  validate_permutation(order, points.size());
  if (order.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t next = (k + 1 == order.size()) ? 0 : k + 1;
    total += distance(points[order[k]], points[order[next]]);
  }
  return total;
}

inline double tour_length(const PointSet& set, std::span<const std::size_t> order) {
  return tour_length(std::span<const Point2>(set.points), order);
}

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

inline bool parse_double(std::string_view tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

// Reads the EUC_2D / ATT subset of TSPLIB-95. Lengths are always computed as
// plain Euclidean distances on the stored coordinates.
inline PointSet load_tsplib(std::istream& in) {
  PointSet set;
  std::optional<std::size_t> dimension;
  std::string weight_type;
  std::string line;
  std::size_t line_no = 0;
  bool in_coords = false;
  bool saw_coords = false;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = detail::trim(line);
    if (text.empty()) continue;
    if (detail::upper(text) == "EOF") break;

    if (in_coords) {
      auto toks = detail::split_ws(text);
      double id = 0.0, x = 0.0, y = 0.0;
      if (toks.size() != 3 || !detail::parse_double(toks[0], id) || !detail::parse_double(toks[1], x) ||
          !detail::parse_double(toks[2], y)) {
        // A new keyword section ends the coordinate block.
        if (!toks.empty() && std::isalpha(static_cast<unsigned char>(toks[0].front()))) {
          in_coords = false;
          if (detail::upper(std::string(toks[0])).find("SECTION") != std::string::npos) {
            throw UnsupportedFormatError("section '" + std::string(toks[0]) + "' is not supported");
          }
          continue;
        }
        throw ParseError(line_no, "malformed coordinate line '" + text + "'");
      }
      set.points.push_back({x, y});
      continue;
    }

    const auto colon = text.find(':');
    std::string key = detail::upper(detail::trim(text.substr(0, colon)));
    std::string value = colon == std::string::npos ? std::string() : detail::trim(text.substr(colon + 1));

    if (key == "NODE_COORD_SECTION") {
      in_coords = true;
      saw_coords = true;
    } else if (key == "NAME") {
      set.name = value;
    } else if (key == "TYPE") {
      if (detail::upper(value) != "TSP") throw UnsupportedFormatError("problem type '" + value + "'");
    } else if (key == "DIMENSION") {
      double d = 0.0;
      if (!detail::parse_double(value, d) || d < 1 || d != std::floor(d)) {
        throw ParseError(line_no, "bad DIMENSION '" + value + "'");
      }
      dimension = static_cast<std::size_t>(d);
    } else if (key == "EDGE_WEIGHT_TYPE") {
      weight_type = detail::upper(value);
      if (weight_type != "EUC_2D" && weight_type != "ATT") {
        throw UnsupportedFormatError("edge weight type '" + value + "'");
      }
    } else if (key == "COMMENT" || key == "DISPLAY_DATA_TYPE" || key == "NODE_COORD_TYPE") {
      // informational
    } else if (key.find("SECTION") != std::string::npos) {
      throw UnsupportedFormatError("section '" + key + "' is not supported");
    } else if (colon == std::string::npos) {
      throw ParseError(line_no, "unexpected line '" + text + "'");
    }
  }

  if (!saw_coords) throw ParseError(line_no + 1, "missing NODE_COORD_SECTION");
  if (dimension && *dimension != set.points.size()) {
    throw ParseError(line_no, "DIMENSION " + std::to_string(*dimension) + " but " +
                                  std::to_string(set.points.size()) + " coordinates");
  }
  set.known_optimum = known_optimum(set.name);
  return set;
}

inline PointSet load_tsplib_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return load_tsplib(in);
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_tsplib(std::ostream& out, const PointSet& set) {
  out << "NAME : " << (set.name.empty() ? "unnamed" : set.name) << '\n'
      << "TYPE : TSP\n"
      << "DIMENSION : " << set.points.size() << '\n'
      << "EDGE_WEIGHT_TYPE : EUC_2D\n"
      << "NODE_COORD_SECTION\n";
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    out << (i + 1) << ' ' << format_double(set.points[i].x) << ' ' << format_double(set.points[i].y) << '\n';
  }
  out << "EOF\n";
}

}  // namespace jolt
