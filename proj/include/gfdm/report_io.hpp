#pragma once

#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "gfdm/cloud_io.hpp"
#include "gfdm/ensemble.hpp"
#include "gfdm/errors.hpp"
#include "gfdm/geometry.hpp"

namespace gfdm {

inline const char* error_report_header() {
  return "problem,N,M,weight,n,rho,mu,dt,Nt,R,seed,l2_error,linf_error";
}

// Error reports as CSV, one row per run, fixed column order.
inline void write_error_reports(const std::string& path,
                                std::span<const ErrorReport> reports) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  out << error_report_header() << '\n';
  for (const auto& r : reports) {
    out << r.problem << ',' << r.node_count << ',' << r.star_size << ','
        << to_string(r.weight.kind) << ',' << detail::format_double(r.weight.exponent)
        << ',' << detail::format_double(r.rho) << ',' << detail::format_double(r.mu)
        << ',' << detail::format_double(r.dt) << ',' << r.step_count << ','
        << r.realizations << ',' << r.seed << ',' << detail::format_double(r.l2)
        << ',' << detail::format_double(r.linf) << '\n';
  }
  if (!out) throw Error("failed while writing " + path);
}

// Field snapshot: one row per node, coordinate columns then the value.
inline void write_field_snapshot(const std::string& path, const PointCloud& cloud,
                                 std::span<const double> values,
                                 const std::string& value_column = "u") {
  if (values.size() != static_cast<size_t>(cloud.size()))
    throw InvalidArgument("value count does not match cloud size");
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  const char* axes[3] = {"x", "y", "z"};
  for (int a = 0; a < cloud.dim(); ++a) out << axes[a] << ',';
  out << value_column << '\n';
  for (int i = 0; i < cloud.size(); ++i) {
    for (int a = 0; a < cloud.dim(); ++a)
      out << detail::format_double(cloud.coord(i, a)) << ',';
    out << detail::format_double(values[static_cast<size_t>(i)]) << '\n';
  }
  if (!out) throw Error("failed while writing " + path);
}

// Snapshot of the ensemble mean at time t, which must sit on the time grid
// to within 1e-9 relative.
inline void write_mean_snapshot(const std::string& path, const PointCloud& cloud,
                                const MeanField& mean, double t) {
  const double ratio = t / mean.dt;
  const long long k = std::llround(ratio);
  if (k < 0 || k > mean.step_count ||
      std::abs(ratio - static_cast<double>(k)) > 1e-9 * std::max(1.0, ratio))
    throw InvalidArgument("snapshot time " + std::to_string(t) +
                          " is not on the time grid");
  write_field_snapshot(path, cloud, mean.row(static_cast<int>(k)), "mean_u");
}

}  // namespace gfdm
