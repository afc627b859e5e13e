#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gfdm/errors.hpp"
#include "gfdm/geometry.hpp"
#include "gfdm/rng.hpp"
#include "gfdm/stencil.hpp"

namespace gfdm {

// Values past this magnitude are treated as blow-up before they reach inf;
// chosen so squaring a flagged value still stays finite.
inline constexpr double kOverflowLimit = 1e154;

// One initial-boundary-value problem for
//   dv = rho * laplacian(v) dt + mu * v dW.
struct ProblemSpec {
  double rho = 0.0;  // diffusivity, > 0
  double mu = 0.0;   // noise intensity, >= 0
  double final_time = 1.0;
  double dt = 0.0;  // must divide final_time

  std::function<double(std::span<const double>)> initial;            // h(x)
  std::function<double(std::span<const double>, double)> boundary;   // F(x, t)

  void validate() const {
    if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
    if (!(mu >= 0.0)) throw InvalidArgument("mu must be nonnegative");
    if (!(final_time > 0.0)) throw InvalidArgument("final_time must be positive");
    if (!(dt > 0.0) || dt > final_time)
      throw InvalidArgument("dt must lie in (0, final_time]");
    if (!initial) throw InvalidArgument("initial condition is not set");
    if (!boundary) throw InvalidArgument("boundary condition is not set");
  }

  // Number of steps; dt must divide final_time to within 1e-9 relative.
  int step_count() const {
    const double ratio = final_time / dt;
    const long long n = std::llround(ratio);
    if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio)
      throw InvalidArgument("dt = " + std::to_string(dt) +
                            " does not divide final_time = " +
                            std::to_string(final_time));
    return static_cast<int>(n);
  }
};

// Field over all cloud nodes at one time level.
struct FieldState {
  int step_index = 0;
  double time = 0.0;
  std::vector<double> values;
};

// Mean-square stability of the explicit scheme: the noise-independent part
// requires 0 <= rho * dt * max_c theta_c <= 1.
struct StabilityReport {
  double max_center_coeff = 0.0;  // max over stars of theta_c
  double dt = 0.0;
  double product = 0.0;  // rho * dt * max_center_coeff
  bool pass = false;
  double dt_limit = 0.0;  // largest dt with product exactly 1
};

class StabilityError : public Error {
 public:
  explicit StabilityError(const StabilityReport& report)
      : Error("time step " + std::to_string(report.dt) +
              " violates the stability bound: rho * dt * max theta_c = " +
              std::to_string(report.product) + " exceeds 1 (largest stable dt " +
              std::to_string(report.dt_limit) + ")"),
        report_(report) {}

  const StabilityReport& report() const { return report_; }

 private:
  StabilityReport report_;
};

// A trajectory left the representable range at the given step.
class OverflowError : public Error {
 public:
  OverflowError(int step, const StabilityReport& report)
      : Error("solution overflow at step " + std::to_string(step) +
              " (rho * dt * max theta_c = " + std::to_string(report.product) +
              ")"),
        step_(step),
        report_(report) {}

  int step() const { return step_; }
  const StabilityReport& report() const { return report_; }

 private:
  int step_;
  StabilityReport report_;
};

inline StabilityReport check_stability(double rho, double dt,
                                       std::span<const LaplacianStencil> stencils) {
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (stencils.empty()) throw InvalidArgument("no stencils given");
  StabilityReport report;
  report.dt = dt;
  for (const auto& s : stencils)
    report.max_center_coeff = std::max(report.max_center_coeff, s.center_coeff);
  report.product = rho * dt * report.max_center_coeff;
  report.pass = report.product >= 0.0 && report.product <= 1.0;
  report.dt_limit = 1.0 / (rho * report.max_center_coeff);
  return report;
}

// Largest time step passing the stability bound, scaled by a safety factor
// in (0, 1].
inline double max_stable_dt(double rho, std::span<const LaplacianStencil> stencils,
                            double safety = 0.5) {
  if (!(safety > 0.0) || safety > 1.0)
    throw InvalidArgument("safety factor must lie in (0, 1]");
  double max_theta = 0.0;
  for (const auto& s : stencils) max_theta = std::max(max_theta, s.center_coeff);
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  if (!(max_theta > 0.0))
    throw DegenerateStencilError("stencils have no positive center coefficient");
  return safety / (rho * max_theta);
}

// Whether one Wiener increment per step drives every node (the model as
// posed) or each interior node draws its own.
enum class NoiseMode { shared_scalar, per_node };

struct RealizationOptions {
  NoiseMode noise = NoiseMode::shared_scalar;
  bool force_unstable = false;
};

inline FieldState initial_state(const PointCloud& cloud, const ProblemSpec& spec) {
  FieldState state;
  state.step_index = 0;
  state.time = 0.0;
  state.values.resize(static_cast<size_t>(cloud.size()));
  for (int i = 0; i < cloud.size(); ++i)
    state.values[static_cast<size_t>(i)] =
        cloud.is_interior(i) ? spec.initial(cloud.position(i))
                             : spec.boundary(cloud.position(i), 0.0);
  return state;
}

namespace detail {

// One Euler-Maruyama update into `next`. dw_at(j) is the Wiener increment
// for the j-th stencil; boundary nodes are refreshed to F(x, t_next) after
// the interior update, so they never see the noise.
template <typename DwAt>
inline void step_into(const std::vector<double>& current, double t_next,
                      const PointCloud& cloud,
                      std::span<const LaplacianStencil> stencils,
                      const ProblemSpec& spec, DwAt&& dw_at,
                      std::vector<double>& next) {
  next = current;
  for (size_t j = 0; j < stencils.size(); ++j) {
    const LaplacianStencil& st = stencils[j];
    const double uc = current[static_cast<size_t>(st.center)];
    double lap = -st.center_coeff * uc;
    for (size_t i = 0; i < st.coeffs.size(); ++i)
      lap += st.coeffs[i] * current[static_cast<size_t>(st.neighbors[i])];
    double v = uc + spec.rho * spec.dt * lap;
    // Skipped entirely at mu = 0 so the drift-only path is untouched by the
    // sign of the zero product.
    if (spec.mu != 0.0) v += spec.mu * uc * dw_at(j);
    next[static_cast<size_t>(st.center)] = v;
  }
  for (int i = 0; i < cloud.size(); ++i)
    if (!cloud.is_interior(i))
      next[static_cast<size_t>(i)] = spec.boundary(cloud.position(i), t_next);
}

inline bool field_overflowed(const std::vector<double>& values) {
  for (double v : values)
    if (!std::isfinite(v) || std::abs(v) > kOverflowLimit) return true;
  return false;
}

inline void require_coverage(const PointCloud& cloud,
                             std::span<const LaplacianStencil> stencils) {
  if (static_cast<int>(stencils.size()) != cloud.interior_count())
    throw InvalidArgument("need exactly one stencil per interior node, got " +
                          std::to_string(stencils.size()) + " for " +
                          std::to_string(cloud.interior_count()));
  std::vector<char> seen(static_cast<size_t>(cloud.size()), 0);
  for (const auto& s : stencils) {
    if (s.center < 0 || s.center >= cloud.size() || !cloud.is_interior(s.center))
      throw InvalidArgument("stencil center " + std::to_string(s.center) +
                            " is not an interior node");
    if (seen[static_cast<size_t>(s.center)]++)
      throw InvalidArgument("node " + std::to_string(s.center) +
                            " has more than one stencil");
  }
}

}  // namespace detail

// One step with a shared scalar increment. Throws OverflowError if the
// update leaves the representable range.
inline FieldState step(const FieldState& state, const PointCloud& cloud,
                       std::span<const LaplacianStencil> stencils,
                       const ProblemSpec& spec, double dw) {
  spec.validate();
  detail::require_coverage(cloud, stencils);
  if (state.values.size() != static_cast<size_t>(cloud.size()))
    throw InvalidArgument("state size does not match cloud size");

  FieldState next;
  next.step_index = state.step_index + 1;
  next.time = state.time + spec.dt;
  detail::step_into(state.values, next.time, cloud, stencils, spec,
                    [dw](size_t) { return dw; }, next.values);
  if (detail::field_overflowed(next.values))
    throw OverflowError(next.step_index,
                        check_stability(spec.rho, spec.dt, stencils));
  return next;
}

// Full time history of one realization: row k is the field at t = k * dt.
struct Trajectory {
  int node_count = 0;
  int step_count = 0;
  double dt = 0.0;
  std::vector<double> data;  // (step_count + 1) * node_count

  std::span<const double> row(int k) const {
    return {data.data() + static_cast<size_t>(k) * node_count,
            static_cast<size_t>(node_count)};
  }
  double time(int k) const { return k * dt; }
};

// Run one noise realization from t = 0 to final_time. The seed fully
// determines the increment sequence. Refuses to start when the stability
// bound fails unless forced.
inline Trajectory run_realization(const PointCloud& cloud,
                                  std::span<const LaplacianStencil> stencils,
                                  const ProblemSpec& spec, std::uint64_t seed,
                                  const RealizationOptions& options = {}) {
  spec.validate();
  detail::require_coverage(cloud, stencils);
  const int n_steps = spec.step_count();

  const StabilityReport stability = check_stability(spec.rho, spec.dt, stencils);
  if (!stability.pass && !options.force_unstable) throw StabilityError(stability);

  const int n = cloud.size();
  Trajectory traj;
  traj.node_count = n;
  traj.step_count = n_steps;
  traj.dt = spec.dt;
  traj.data.resize(static_cast<size_t>(n_steps + 1) * n);

  std::vector<double> current(static_cast<size_t>(n));
  const FieldState start = initial_state(cloud, spec);
  current = start.values;
  std::copy(current.begin(), current.end(), traj.data.begin());

  NoiseStream noise(seed);
  std::vector<double> increments;
  std::vector<double> next;
  for (int k = 0; k < n_steps; ++k) {
    const double t_next = (k + 1) * spec.dt;
    if (options.noise == NoiseMode::shared_scalar) {
      const double dw = sample_wiener_increment(noise, spec.dt);
      detail::step_into(current, t_next, cloud, stencils, spec,
                        [dw](size_t) { return dw; }, next);
    } else {
      increments.resize(stencils.size());
      for (auto& dw : increments) dw = sample_wiener_increment(noise, spec.dt);
      detail::step_into(current, t_next, cloud, stencils, spec,
                        [&](size_t j) { return increments[j]; }, next);
    }
    if (detail::field_overflowed(next))
      throw OverflowError(k + 1, stability);
    current.swap(next);
    std::copy(current.begin(), current.end(),
              traj.data.begin() + static_cast<size_t>(k + 1) * n);
  }
  return traj;
}

}  // namespace gfdm
