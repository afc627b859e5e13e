// Command-line front end: solve, convergence, stability, gen-cloud.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gfdm/gfdm.hpp"

namespace fs = std::filesystem;
using namespace gfdm;

namespace {

// Flag-level overrides; everything not given on the command line comes from
// the config file, and everything not in the file from the defaults.
struct Overrides {
  std::string config_path;
  std::optional<std::string> problem;
  std::optional<std::uint64_t> seed;
  std::optional<int> realizations;
  std::optional<std::string> dt;
  std::optional<double> safety;
  std::optional<int> threads;
  std::optional<std::string> out;
  bool force_unstable = false;
  bool dump_stencils = false;

  // gen-cloud specific
  std::optional<int> dim;
  std::optional<std::string> kind;
  std::optional<int> points_per_axis;
  std::optional<int> n_interior;
  std::optional<int> boundary_per_face;
  std::optional<std::uint64_t> cloud_seed;
};

void add_common_options(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config_path, "key = value configuration file");
  sub->add_option("--seed", o.seed, "master seed of the ensemble");
  sub->add_option("--realizations", o.realizations, "number of noise realizations");
  sub->add_option("--dt", o.dt, "time step, a number or 'auto'");
  sub->add_option("--safety", o.safety, "safety factor for the auto time step");
  sub->add_option("--threads", o.threads, "worker threads (0 = hardware)");
  sub->add_option("--out", o.out, "output directory");
  sub->add_flag("--force-unstable", o.force_unstable,
                "run even when the stability bound fails");
}

RunConfig resolve_config(const Overrides& o) {
  RunConfig config;
  if (!o.config_path.empty())
    apply_config_entries(config, parse_config_file(o.config_path));
  if (o.problem) config.problem = parse_problem_id(*o.problem);
  if (o.seed) config.seed = *o.seed;
  if (o.realizations) config.realizations = *o.realizations;
  if (o.dt) {
    if (*o.dt == "auto") {
      config.dt.reset();
    } else {
      double v = 0.0;
      if (!detail::parse_double(*o.dt, v))
        throw ConfigError("--dt expects a number or 'auto', got \"" + *o.dt + "\"");
      config.dt = v;
    }
  }
  if (o.safety) config.safety = *o.safety;
  if (o.threads) config.threads = *o.threads;
  if (o.out) config.out_dir = *o.out;
  if (o.force_unstable) config.force_unstable = true;
  if (o.dump_stencils) config.dump_stencils = true;

  if (o.dim) {
    if (*o.dim == 1) config.problem = ProblemId::diffusion1d;
    else if (*o.dim == 2) config.problem = ProblemId::diffusion2d;
    else if (*o.dim == 3) config.problem = ProblemId::diffusion3d;
    else throw ConfigError("--dim must be 1, 2, or 3");
  }
  if (o.kind) {
    if (*o.kind == "regular") config.cloud_kind = CloudKind::regular;
    else if (*o.kind == "random") config.cloud_kind = CloudKind::random;
    else throw ConfigError("--kind must be regular or random");
  }
  if (o.points_per_axis) config.points_per_axis = *o.points_per_axis;
  if (o.n_interior) config.n_interior = *o.n_interior;
  if (o.boundary_per_face) config.boundary_per_face = *o.boundary_per_face;
  if (o.cloud_seed) config.cloud_seed = *o.cloud_seed;

  finalize_config(config);
  return config;
}

PointCloud build_cloud(const RunConfig& config) {
  const Domain domain = problem_domain(config.problem);
  if (config.cloud == CloudSource::file) return load_cloud(config.cloud_file, domain);
  if (config.cloud_kind == CloudKind::regular)
    return generate_regular_grid(domain, config.points_per_axis);
  return generate_random_cloud(domain, config.n_interior,
                               BoundarySpec::uniform(config.boundary_per_face),
                               config.cloud_seed);
}

void print_stability(const StabilityReport& report) {
  std::printf("stability: max_theta_c = %.6g, dt = %.6g, rho*dt*max_theta_c = %.6g, "
              "pass = %s, dt_limit = %.6g\n",
              report.max_center_coeff, report.dt, report.product,
              report.pass ? "yes" : "no", report.dt_limit);
}

std::string snapshot_name(double t) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "mean_t%g.csv", t);
  return buf;
}

void print_report_table(const std::vector<ErrorReport>& reports) {
  std::printf("%10s %6s %6s %12s %8s %8s %14s %14s\n", "N", "M", "weight", "dt",
              "Nt", "R", "l2_error", "linf_error");
  for (const auto& r : reports)
    std::printf("%10d %6d %6s %12.6g %8d %8d %14.6e %14.6e\n", r.node_count,
                r.star_size, to_string(r.weight.kind), r.dt, r.step_count,
                r.realizations, r.l2, r.linf);
}

int cmd_solve(const RunConfig& config) {
  fs::create_directories(config.out_dir);
  const PointCloud cloud = build_cloud(config);
  const StarSet stars = build_all_stars(cloud, config.star_size, config.threads);
  const auto stencils = build_laplacian_stencils(stars, config.weight, config.threads);

  const double dt = config.dt ? *config.dt
                              : resolve_auto_dt(config.rho, stencils,
                                                config.final_time, config.safety);
  const StabilityReport stability = check_stability(config.rho, dt, stencils);
  std::printf("problem %s: %d nodes (%d interior), M = %d, weight = %s, n = %g\n",
              to_string(config.problem), cloud.size(), cloud.interior_count(),
              config.star_size, to_string(config.weight.kind),
              config.weight.exponent);
  print_stability(stability);

  const fs::path out_dir(config.out_dir);
  write_config_echo((out_dir / "resolved_config.cfg").string(), config,
                    {"resolved dt = " + detail::format_double(dt),
                     "max theta_c = " + detail::format_double(stability.max_center_coeff)});

  if (config.dump_stencils) {
    std::ofstream dump(out_dir / "stencils.csv");
    write_stencil_dump(dump, stars, config.weight);
  }

  if (!stability.pass && !config.force_unstable) throw StabilityError(stability);

  const ProblemSpec spec = make_problem_spec(config.problem, config.rho, config.mu,
                                             config.final_time, dt);
  EnsembleConfig ens;
  ens.realizations = config.realizations;
  ens.master_seed = config.seed;
  ens.noise = config.noise;
  ens.force_unstable = config.force_unstable;
  ens.workers = config.threads;
  const MeanField mean = run_ensemble(cloud, stencils, spec, ens);

  const AnalyticSolution sol{config.problem, config.rho};
  ErrorReport report;
  report.problem = to_string(config.problem);
  report.node_count = cloud.size();
  report.star_size = config.star_size;
  report.weight = config.weight;
  report.rho = config.rho;
  report.mu = config.mu;
  report.dt = dt;
  report.step_count = spec.step_count();
  report.realizations = config.realizations;
  report.seed = config.seed;
  report.l2 = l2_error(mean, sol, cloud);
  report.linf = linf_error(mean, sol, cloud, config.linf_final_only);

  write_error_reports((out_dir / "error_report.csv").string(), {&report, 1});
  std::vector<double> times = config.snapshot_times;
  if (times.empty()) times.push_back(config.final_time);
  for (double t : times)
    write_mean_snapshot((out_dir / snapshot_name(t)).string(), cloud, mean, t);

  std::printf("ensemble: R = %d, seed = %llu, noise = %s\n", config.realizations,
              static_cast<unsigned long long>(config.seed),
              config.noise == NoiseMode::shared_scalar ? "shared" : "per_node");
  std::printf("errors: l2 = %.6e, linf = %.6e\n", report.l2, report.linf);
  std::printf("wrote %s\n", (out_dir / "error_report.csv").string().c_str());
  return 0;
}

int cmd_convergence(const RunConfig& config) {
  fs::create_directories(config.out_dir);

  std::vector<PointCloud> clouds;
  switch (config.refine_rule) {
    case RefineRule::midpoint: {
      clouds.push_back(build_cloud(config));
      for (int level = 1; level < config.refine_levels; ++level)
        clouds.push_back(refine_midpoints(clouds.back()));
      break;
    }
    case RefineRule::per_axis: {
      if (config.per_axis_list.empty())
        throw ConfigError("refine_rule = per_axis requires per_axis_list");
      for (int n : config.per_axis_list)
        clouds.push_back(
            generate_regular_grid(problem_domain(config.problem), n));
      break;
    }
    case RefineRule::files: {
      std::vector<std::string> files = config.cloud_files;
      if (files.empty()) files.push_back(config.cloud_file);
      for (const auto& f : files)
        clouds.push_back(load_cloud(f, problem_domain(config.problem)));
      break;
    }
  }

  StudyConfig study;
  study.rho = config.rho;
  study.mu = config.mu;
  study.final_time = config.final_time;
  study.star_size = config.star_size;
  study.weight = config.weight;
  study.pinned_dt = config.dt;
  study.safety = config.safety;
  study.linf_final_only = config.linf_final_only;

  EnsembleConfig ens;
  ens.realizations = config.realizations;
  ens.master_seed = config.seed;
  ens.noise = config.noise;
  ens.force_unstable = config.force_unstable;
  ens.workers = config.threads;

  const fs::path out_dir(config.out_dir);
  write_config_echo((out_dir / "resolved_config.cfg").string(), config);

  const auto reports = convergence_study(config.problem, clouds, study, ens);
  print_report_table(reports);
  write_error_reports((out_dir / "convergence.csv").string(), reports);
  std::printf("wrote %s\n", (out_dir / "convergence.csv").string().c_str());
  return 0;
}

int cmd_stability(const RunConfig& config) {
  const PointCloud cloud = build_cloud(config);
  const StarSet stars = build_all_stars(cloud, config.star_size, config.threads);
  const auto stencils = build_laplacian_stencils(stars, config.weight, config.threads);

  // The auto step is reported unrounded here, so product = safety exactly.
  const double dt = config.dt ? *config.dt
                              : max_stable_dt(config.rho, stencils, config.safety);
  const StabilityReport report = check_stability(config.rho, dt, stencils);
  std::printf("problem %s: %d nodes (%d interior), M = %d\n",
              to_string(config.problem), cloud.size(), cloud.interior_count(),
              config.star_size);
  print_stability(report);
  return report.pass ? 0 : 1;
}

int cmd_gen_cloud(const RunConfig& config) {
  fs::create_directories(config.out_dir);
  const PointCloud cloud = build_cloud(config);
  const fs::path path = fs::path(config.out_dir) / "cloud.csv";
  save_cloud(cloud, path.string());
  std::printf("wrote %s: %d nodes (%d interior, %d boundary), dim %d\n",
              path.string().c_str(), cloud.size(), cloud.interior_count(),
              cloud.boundary_count(), cloud.dim());
  return 0;
}

template <typename F>
int run_guarded(F&& f) {
  try {
    return f();
  } catch (const StabilityError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const EnsembleOverflowError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const OverflowError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const UnsupportedDimension& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const DegenerateCloud& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const SingularStarError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const DegenerateStencilError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Meshless solver for the stochastic heat equation "
               "dv = rho lap(v) dt + mu v dW on scattered point clouds"};
  app.require_subcommand(1);

  Overrides solve_o, conv_o, stab_o, gen_o;

  CLI::App* solve = app.add_subcommand(
      "solve", "run one ensemble and report errors against the expected solution");
  add_common_options(solve, solve_o);
  solve->add_option("--problem", solve_o.problem,
                    "diffusion1d, diffusion2d, or diffusion3d");
  solve->add_flag("--dump-stencils", solve_o.dump_stencils,
                  "write per-star moment matrices, factors, and stencils");

  CLI::App* conv = app.add_subcommand(
      "convergence", "run the same problem over refined clouds and tabulate errors");
  add_common_options(conv, conv_o);
  conv->add_option("--problem", conv_o.problem,
                   "diffusion1d, diffusion2d, or diffusion3d");

  CLI::App* stab = app.add_subcommand(
      "stability", "report the explicit-scheme stability bound for a configuration");
  add_common_options(stab, stab_o);
  stab->add_option("--problem", stab_o.problem,
                   "diffusion1d, diffusion2d, or diffusion3d");

  CLI::App* gen = app.add_subcommand("gen-cloud", "generate a point cloud CSV");
  add_common_options(gen, gen_o);
  gen->add_option("--dim", gen_o.dim, "cloud dimension, 1 to 3");
  gen->add_option("--kind", gen_o.kind, "regular or random");
  gen->add_option("--points-per-axis", gen_o.points_per_axis,
                  "grid points per axis for regular clouds");
  gen->add_option("--n-interior", gen_o.n_interior,
                  "interior node count for random clouds");
  gen->add_option("--boundary-per-face", gen_o.boundary_per_face,
                  "boundary nodes per face for random clouds");
  gen->add_option("--cloud-seed", gen_o.cloud_seed, "seed of the cloud sampler");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits cleanly, bad flags are config errors
  }

  if (solve->parsed())
    return run_guarded([&] { return cmd_solve(resolve_config(solve_o)); });
  if (conv->parsed())
    return run_guarded([&] { return cmd_convergence(resolve_config(conv_o)); });
  if (stab->parsed())
    return run_guarded([&] { return cmd_stability(resolve_config(stab_o)); });
  return run_guarded([&] { return cmd_gen_cloud(resolve_config(gen_o)); });
}
