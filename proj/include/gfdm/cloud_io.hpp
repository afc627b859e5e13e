#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gfdm/errors.hpp"
#include "gfdm/geometry.hpp"

namespace gfdm {

namespace detail {

// %.17g: shortest form that still round-trips an IEEE double exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string strip(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(strip(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size();
  } catch (...) {
    return false;
  }
}

}  // namespace detail

// One row per node: dim coordinate columns then a role column, no header.
inline void save_cloud(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  for (int i = 0; i < cloud.size(); ++i) {
    for (int a = 0; a < cloud.dim(); ++a)
      out << detail::format_double(cloud.coord(i, a)) << ',';
    out << to_string(cloud.role(i)) << '\n';
  }
  if (!out) throw Error("failed while writing " + path);
}

// Read a cloud CSV. The column count of the first data row fixes the
// dimension (columns minus the role column). A first line whose first field
// is not numeric is treated as a header and skipped. When no domain is
// given, the bounding box of the nodes is used; axes with zero extent are
// padded by 0.5 on each side so the box stays a valid domain.
inline PointCloud load_cloud(const std::string& path,
                             std::optional<Domain> domain = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path + " for reading");

  std::vector<double> coords;
  std::vector<NodeRole> roles;
  int dim = 0;

  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = detail::strip(line);
    if (text.empty()) continue;

    const auto fields = detail::split_csv(text);
    double first = 0.0;
    if (roles.empty() && !detail::parse_double(fields[0], first)) {
      if (line_no == 1) continue;  // header row
      throw ParseError(path, line_no, "expected a numeric coordinate, got \"" +
                                          fields[0] + "\"");
    }

    if (dim == 0) {
      dim = static_cast<int>(fields.size()) - 1;
      if (dim < 1 || dim > 3)
        throw ParseError(path, line_no,
                         "expected 2 to 4 columns (1 to 3 coordinates plus a "
                         "role), got " + std::to_string(fields.size()));
    } else if (static_cast<int>(fields.size()) != dim + 1) {
      throw ParseError(path, line_no,
                       "expected " + std::to_string(dim + 1) + " columns, got " +
                           std::to_string(fields.size()));
    }

    for (int a = 0; a < dim; ++a) {
      double v = 0.0;
      if (!detail::parse_double(fields[static_cast<size_t>(a)], v))
        throw ParseError(path, line_no, "column " + std::to_string(a + 1) +
                                            " is not a number: \"" +
                                            fields[static_cast<size_t>(a)] + "\"");
      coords.push_back(v);
    }

    const std::string& role = fields[static_cast<size_t>(dim)];
    if (role == "interior")
      roles.push_back(NodeRole::interior);
    else if (role == "boundary")
      roles.push_back(NodeRole::boundary);
    else
      throw ParseError(path, line_no,
                       "role must be \"interior\" or \"boundary\", got \"" +
                           role + "\"");
  }

  if (roles.empty()) throw ParseError(path, std::max(line_no, 1L), "no data rows");

  if (!domain) {
    std::array<double, 3> lo{}, hi{};
    for (int a = 0; a < dim; ++a) {
      lo[static_cast<size_t>(a)] = coords[static_cast<size_t>(a)];
      hi[static_cast<size_t>(a)] = coords[static_cast<size_t>(a)];
    }
    for (size_t i = 0; i < roles.size(); ++i)
      for (int a = 0; a < dim; ++a) {
        const double v = coords[i * static_cast<size_t>(dim) + static_cast<size_t>(a)];
        lo[static_cast<size_t>(a)] = std::min(lo[static_cast<size_t>(a)], v);
        hi[static_cast<size_t>(a)] = std::max(hi[static_cast<size_t>(a)], v);
      }
    for (int a = 0; a < dim; ++a)
      if (lo[static_cast<size_t>(a)] == hi[static_cast<size_t>(a)]) {
        lo[static_cast<size_t>(a)] -= 0.5;
        hi[static_cast<size_t>(a)] += 0.5;
      }
    domain = Domain(dim, lo, hi);
  } else if (domain->dim != dim) {
    throw InvalidArgument("domain dimension " + std::to_string(domain->dim) +
                          " does not match file dimension " + std::to_string(dim));
  }

  return PointCloud(*domain, std::move(coords), std::move(roles));
}

}  // namespace gfdm
