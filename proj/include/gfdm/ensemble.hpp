#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gfdm/errors.hpp"
#include "gfdm/parallel.hpp"
#include "gfdm/problems.hpp"
#include "gfdm/rng.hpp"
#include "gfdm/sde.hpp"
#include "gfdm/stars.hpp"
#include "gfdm/stencil.hpp"
#include "gfdm/weights.hpp"

namespace gfdm {

struct EnsembleConfig {
  int realizations = 1000;
  std::uint64_t master_seed = 12345;
  NoiseMode noise = NoiseMode::shared_scalar;
  bool force_unstable = false;
  int workers = 0;  // 0 = hardware default, capped by GFDM_THREADS
};

// Ensemble average of the field over all realizations, per time level.
struct MeanField {
  int node_count = 0;
  int step_count = 0;
  double dt = 0.0;
  int realizations = 0;
  std::vector<double> mean;  // (step_count + 1) * node_count

  std::span<const double> row(int k) const {
    return {mean.data() + static_cast<size_t>(k) * node_count,
            static_cast<size_t>(node_count)};
  }
  double time(int k) const { return k * dt; }
};

// Overflow inside an ensemble, tagged with which realization blew up.
class EnsembleOverflowError : public Error {
 public:
  EnsembleOverflowError(int realization, std::uint64_t seed, const OverflowError& cause)
      : Error("realization " + std::to_string(realization) + " (seed " +
              std::to_string(seed) + "): " + cause.what()),
        realization_(realization),
        seed_(seed),
        step_(cause.step()) {}

  int realization() const { return realization_; }
  std::uint64_t seed() const { return seed_; }
  int step() const { return step_; }

 private:
  int realization_;
  std::uint64_t seed_;
  int step_;
};

// Monte Carlo mean over config.realizations independent noise paths.
//
// Realization r always runs with realization_seed(master_seed, r), and the
// sum over realizations is accumulated in increasing r, whatever the worker
// count; results are therefore bit-identical from 1 thread to many.
// Realizations are processed in fixed windows: each window is computed in
// parallel, then folded in order. With mu = 0 every realization is the same
// deterministic trajectory, so it is computed once and used as the mean
// exactly.
inline MeanField run_ensemble(const PointCloud& cloud,
                              std::span<const LaplacianStencil> stencils,
                              const ProblemSpec& spec, const EnsembleConfig& config) {
  spec.validate();
  if (config.realizations < 1)
    throw InvalidArgument("ensemble needs at least one realization");

  const StabilityReport stability = check_stability(spec.rho, spec.dt, stencils);
  if (!stability.pass && !config.force_unstable) throw StabilityError(stability);

  RealizationOptions options;
  options.noise = config.noise;
  options.force_unstable = config.force_unstable;

  const int n_steps = spec.step_count();
  const int n = cloud.size();

  MeanField out;
  out.node_count = n;
  out.step_count = n_steps;
  out.dt = spec.dt;
  out.realizations = config.realizations;

  auto run_one = [&](int r) {
    const std::uint64_t seed = realization_seed(config.master_seed, r);
    try {
      return run_realization(cloud, stencils, spec, seed, options);
    } catch (const OverflowError& e) {
      throw EnsembleOverflowError(r, seed, e);
    }
  };

  if (spec.mu == 0.0 || config.realizations == 1) {
    out.mean = run_one(0).data;
    return out;
  }

  const size_t traj_values = static_cast<size_t>(n_steps + 1) * n;
  // Window = parallelism grain and peak-memory knob; the output does not
  // depend on it. Hold at most ~256 MB of trajectory buffers.
  int window = static_cast<int>(std::min<size_t>(
      32, std::max<size_t>(1, (size_t{1} << 28) / (traj_values * sizeof(double) + 1))));
  window = std::min(window, config.realizations);

  std::vector<double> sum(traj_values, 0.0);
  std::vector<Trajectory> slots(static_cast<size_t>(window));
  for (int begin = 0; begin < config.realizations; begin += window) {
    const int count = std::min(window, config.realizations - begin);
    parallel_for(count, config.workers,
                 [&](int i) { slots[static_cast<size_t>(i)] = run_one(begin + i); });
    for (int i = 0; i < count; ++i) {
      const auto& data = slots[static_cast<size_t>(i)].data;
      for (size_t v = 0; v < traj_values; ++v) sum[v] += data[v];
      slots[static_cast<size_t>(i)] = Trajectory{};
    }
  }

  out.mean.resize(traj_values);
  const double inv_r = 1.0 / config.realizations;
  for (size_t v = 0; v < traj_values; ++v) out.mean[v] = sum[v] * inv_r;
  return out;
}

// Discrete L2 distance between the ensemble mean and the expected solution,
// averaged over every node and every time level after the initial one:
//   sqrt( (1 / (Nt * N)) * sum_{k=1..Nt} sum_c (mean_k(c) - E v(x_c, t_k))^2 ).
inline double l2_error(const MeanField& mean, const AnalyticSolution& sol,
                       const PointCloud& cloud) {
  if (mean.node_count != cloud.size())
    throw InvalidArgument("mean field does not match the cloud");
  double acc = 0.0;
  for (int k = 1; k <= mean.step_count; ++k) {
    const auto row = mean.row(k);
    const double t = mean.time(k);
    for (int c = 0; c < cloud.size(); ++c) {
      const double diff = row[static_cast<size_t>(c)] -
                          analytic_eval(sol, cloud.position(c), t);
      acc += diff * diff;
    }
  }
  return std::sqrt(acc / (static_cast<double>(mean.step_count) * cloud.size()));
}

// Largest pointwise deviation, over all nodes and all time levels after the
// initial one; or only the final level if final_time_only.
inline double linf_error(const MeanField& mean, const AnalyticSolution& sol,
                         const PointCloud& cloud, bool final_time_only = false) {
  if (mean.node_count != cloud.size())
    throw InvalidArgument("mean field does not match the cloud");
  double worst = 0.0;
  const int k_begin = final_time_only ? mean.step_count : 1;
  for (int k = k_begin; k <= mean.step_count; ++k) {
    const auto row = mean.row(k);
    const double t = mean.time(k);
    for (int c = 0; c < cloud.size(); ++c)
      worst = std::max(worst, std::abs(row[static_cast<size_t>(c)] -
                                       analytic_eval(sol, cloud.position(c), t)));
  }
  return worst;
}

// One benchmark run reduced to its reproducibility metadata and errors.
struct ErrorReport {
  std::string problem;
  int node_count = 0;
  int star_size = 0;
  WeightSpec weight;
  double rho = 0.0;
  double mu = 0.0;
  double dt = 0.0;
  int step_count = 0;
  int realizations = 0;
  std::uint64_t seed = 0;
  double l2 = 0.0;
  double linf = 0.0;
};

// Parameters shared by the levels of a convergence study (and by single
// benchmark runs).
struct StudyConfig {
  double rho = 0.0;
  double mu = 0.0;
  double final_time = 1.0;
  int star_size = 0;  // 0 = default for the dimension
  WeightSpec weight;
  std::optional<double> pinned_dt;  // empty = per-cloud stability rule
  double safety = 0.5;
  bool linf_final_only = false;
};

// Auto time step: largest stable dt scaled by `safety`, then shrunk to the
// nearest exact divisor of final_time.
inline double resolve_auto_dt(double rho, std::span<const LaplacianStencil> stencils,
                              double final_time, double safety) {
  const double raw = max_stable_dt(rho, stencils, safety);
  const double steps = std::max(1.0, std::ceil(final_time / raw));
  return final_time / steps;
}

struct CaseResult {
  MeanField mean;
  ErrorReport report;
  StabilityReport stability;
};

// One full benchmark case on one cloud: stars, stencils, time step, ensemble,
// errors.
inline CaseResult run_case(ProblemId id, const PointCloud& cloud,
                           const StudyConfig& study, const EnsembleConfig& ensemble) {
  if (cloud.dim() != problem_dim(id))
    throw InvalidArgument(std::string("problem ") + to_string(id) + " is " +
                          std::to_string(problem_dim(id)) + "D but the cloud is " +
                          std::to_string(cloud.dim()) + "D");
  const int m = study.star_size > 0 ? study.star_size : default_star_size(cloud.dim());
  const StarSet stars = build_all_stars(cloud, m, ensemble.workers);
  const auto stencils = build_laplacian_stencils(stars, study.weight, ensemble.workers);

  const double dt = study.pinned_dt
                        ? *study.pinned_dt
                        : resolve_auto_dt(study.rho, stencils, study.final_time,
                                          study.safety);
  const ProblemSpec spec =
      make_problem_spec(id, study.rho, study.mu, study.final_time, dt);

  CaseResult result;
  result.stability = check_stability(study.rho, dt, stencils);
  result.mean = run_ensemble(cloud, stencils, spec, ensemble);

  const AnalyticSolution sol{id, study.rho};
  result.report.problem = to_string(id);
  result.report.node_count = cloud.size();
  result.report.star_size = m;
  result.report.weight = study.weight;
  result.report.rho = study.rho;
  result.report.mu = study.mu;
  result.report.dt = dt;
  result.report.step_count = spec.step_count();
  result.report.realizations = ensemble.realizations;
  result.report.seed = ensemble.master_seed;
  result.report.l2 = l2_error(result.mean, sol, cloud);
  result.report.linf = linf_error(result.mean, sol, cloud, study.linf_final_only);
  return result;
}

// The same benchmark over a sequence of clouds, one ErrorReport per level.
inline std::vector<ErrorReport> convergence_study(ProblemId id,
                                                  std::span<const PointCloud> clouds,
                                                  const StudyConfig& study,
                                                  const EnsembleConfig& ensemble) {
  if (clouds.empty()) throw InvalidArgument("convergence study needs clouds");
  std::vector<ErrorReport> reports;
  reports.reserve(clouds.size());
  for (const auto& cloud : clouds)
    reports.push_back(run_case(id, cloud, study, ensemble).report);
  return reports;
}

}  // namespace gfdm
