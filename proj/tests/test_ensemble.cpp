#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <unordered_set>
#include <vector>

#include <gfdm/ensemble.hpp>
#include <gfdm/errors.hpp>
#include <gfdm/geometry.hpp>
#include <gfdm/problems.hpp>
#include <gfdm/rng.hpp>
#include <gfdm/sde.hpp>
#include <gfdm/stars.hpp>
#include <gfdm/stencil.hpp>

using namespace gfdm;

namespace {

struct Discretization {
  PointCloud cloud;
  std::vector<LaplacianStencil> stencils;
};

Discretization line_discretization(int n, int star_size) {
  auto cloud = generate_regular_grid(Domain::unit_box(1), n);
  const auto stars = build_all_stars(cloud, star_size);
  auto stencils =
      build_laplacian_stencils(stars, WeightSpec{WeightKind::potential, 3.0});
  return {std::move(cloud), std::move(stencils)};
}

// Single-node cloud plus a hand-built mean history: every row carries the
// expected solution, deviated by the given offsets from level 1 on.
struct ScalarHistory {
  PointCloud cloud;
  MeanField mean;
  AnalyticSolution sol;
};

ScalarHistory scalar_history(double dt, std::span<const double> deviations) {
  const AnalyticSolution sol{ProblemId::diffusion1d, 0.005};
  PointCloud cloud(Domain::unit_box(1), {0.5}, {NodeRole::interior});
  MeanField mean;
  mean.node_count = 1;
  mean.step_count = static_cast<int>(deviations.size());
  mean.dt = dt;
  mean.realizations = 1;
  const double x[1] = {0.5};
  mean.mean.push_back(analytic_eval(sol, x, 0.0));
  for (size_t k = 0; k < deviations.size(); ++k)
    mean.mean.push_back(analytic_eval(sol, x, dt * static_cast<double>(k + 1)) +
                        deviations[k]);
  return {std::move(cloud), std::move(mean), sol};
}

}  // namespace

TEST_CASE("realization seeds") {
  SECTION("distinct realizations get distinct seeds") {
    std::unordered_set<std::uint64_t> seen;
    for (int r = 0; r < 100'000; ++r)
      REQUIRE(seen.insert(realization_seed(12345, r)).second);
  }
  SECTION("the master seed moves every realization seed") {
    for (int r = 0; r < 100; ++r)
      REQUIRE(realization_seed(1, r) != realization_seed(2, r));
  }
}

TEST_CASE("ensemble mean reductions") {
  const auto disc = line_discretization(9, 4);
  const auto spec =
      make_problem_spec(ProblemId::diffusion1d, 0.005, 0.5, 1.0, 0.125);

  SECTION("one realization is returned verbatim") {
    EnsembleConfig config;
    config.realizations = 1;
    config.master_seed = 777;
    const auto mean = run_ensemble(disc.cloud, disc.stencils, spec, config);
    const auto traj = run_realization(disc.cloud, disc.stencils, spec,
                                      realization_seed(777, 0));
    REQUIRE(mean.realizations == 1);
    REQUIRE(mean.step_count == 8);
    REQUIRE(mean.mean == traj.data);
  }
  SECTION("without noise the ensemble size is irrelevant, bit for bit") {
    auto drift = spec;
    drift.mu = 0.0;
    EnsembleConfig one;
    one.realizations = 1;
    EnsembleConfig five;
    five.realizations = 5;
    five.master_seed = 999;  // must not matter either
    const auto a = run_ensemble(disc.cloud, disc.stencils, drift, one);
    const auto b = run_ensemble(disc.cloud, disc.stencils, drift, five);
    REQUIRE(a.mean == b.mean);
    REQUIRE(b.realizations == 5);
  }
  SECTION("the mean is the plain average of the realizations") {
    EnsembleConfig config;
    config.realizations = 3;
    config.master_seed = 2024;
    const auto mean = run_ensemble(disc.cloud, disc.stencils, spec, config);
    std::vector<double> sum(mean.mean.size(), 0.0);
    for (int r = 0; r < 3; ++r) {
      const auto traj = run_realization(disc.cloud, disc.stencils, spec,
                                        realization_seed(2024, r));
      for (size_t v = 0; v < sum.size(); ++v) sum[v] += traj.data[v];
    }
    for (size_t v = 0; v < sum.size(); ++v)
      REQUIRE(mean.mean[v] == sum[v] * (1.0 / 3.0));
  }
  SECTION("worker count never changes the result") {
    EnsembleConfig serial;
    serial.realizations = 64;
    serial.master_seed = 5150;
    serial.workers = 1;
    EnsembleConfig threaded = serial;
    threaded.workers = 4;
    const auto a = run_ensemble(disc.cloud, disc.stencils, spec, serial);
    const auto b = run_ensemble(disc.cloud, disc.stencils, spec, threaded);
    REQUIRE(a.mean == b.mean);
  }
  SECTION("at least one realization is required") {
    EnsembleConfig config;
    config.realizations = 0;
    REQUIRE_THROWS_AS(run_ensemble(disc.cloud, disc.stencils, spec, config),
                      InvalidArgument);
  }
}

TEST_CASE("growing the ensemble pulls the mean toward the drift solution") {
  // E v solves the noise-free equation, so the gap between the Monte Carlo
  // mean and the mu = 0 trajectory on the same discretization is pure
  // sampling error and shrinks with R. Checked on the final time level,
  // averaged over master seeds; the two-decades-apart sizes must also be
  // ordered for every seed.
  const auto disc = line_discretization(19, 4);
  const auto noisy =
      make_problem_spec(ProblemId::diffusion1d, 0.005, 0.5, 1.0, 0.05);
  auto drift = noisy;
  drift.mu = 0.0;
  const auto reference = run_realization(disc.cloud, disc.stencils, drift, 0);
  const auto ref_final = reference.row(reference.step_count);

  const int sizes[] = {10, 100, 1000};
  const std::uint64_t masters[] = {101, 202, 303};
  double gap[3][3];
  for (int s = 0; s < 3; ++s) {
    for (int m = 0; m < 3; ++m) {
      EnsembleConfig config;
      config.realizations = sizes[s];
      config.master_seed = masters[m];
      const auto mean = run_ensemble(disc.cloud, disc.stencils, noisy, config);
      const auto row = mean.row(mean.step_count);
      double sup = 0.0;
      for (size_t c = 0; c < row.size(); ++c)
        sup = std::max(sup, std::abs(row[c] - ref_final[c]));
      gap[s][m] = sup;
    }
  }
  for (int s = 0; s + 1 < 3; ++s) {
    const double coarse = (gap[s][0] + gap[s][1] + gap[s][2]) / 3.0;
    const double fine = (gap[s + 1][0] + gap[s + 1][1] + gap[s + 1][2]) / 3.0;
    REQUIRE(coarse > fine);
  }
  for (int m = 0; m < 3; ++m) REQUIRE(gap[0][m] > gap[2][m]);
}

TEST_CASE("expected solutions") {
  SECTION("pinned values") {
    const double x1[1] = {0.5};
    REQUIRE(analytic_eval({ProblemId::diffusion1d, 0.005}, x1, 0.0) ==
            Catch::Approx(1.0).margin(1e-15));
    const double x2[2] = {0.0, 0.0};
    REQUIRE(analytic_eval({ProblemId::diffusion2d, 0.01}, x2, 0.0) == 0.0);
    const double x3[3] = {0.5, 0.5, 0.5};
    const double pi = std::numbers::pi;
    REQUIRE(analytic_eval({ProblemId::diffusion3d, 1.0}, x3, 1.0) ==
            Catch::Approx(std::exp(-3.0 * pi * pi)).epsilon(1e-12));
  }
  SECTION("each closed form satisfies its equation") {
    // Central-difference residual of v_t = rho lap v at random sample points.
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> coord(0.2, 0.8);
    std::uniform_real_distribution<double> when(0.1, 1.0);
    const double h = 1e-4;
    const AnalyticSolution sols[] = {{ProblemId::diffusion1d, 0.005},
                                     {ProblemId::diffusion2d, 0.01},
                                     {ProblemId::diffusion3d, 1.0}};
    for (const auto& sol : sols) {
      const int d = problem_dim(sol.id);
      for (int trial = 0; trial < 100; ++trial) {
        double x[3] = {0.0, 0.0, 0.0};
        for (int a = 0; a < d; ++a) x[a] = coord(rng);
        const double t = when(rng);
        const std::span<const double> xs{x, static_cast<size_t>(d)};

        const double vt = (analytic_eval(sol, xs, t + h) -
                           analytic_eval(sol, xs, t - h)) /
                          (2.0 * h);
        double lap = 0.0;
        const double center = analytic_eval(sol, xs, t);
        for (int a = 0; a < d; ++a) {
          const double saved = x[a];
          x[a] = saved + h;
          const double up = analytic_eval(sol, xs, t);
          x[a] = saved - h;
          const double down = analytic_eval(sol, xs, t);
          x[a] = saved;
          lap += (up - 2.0 * center + down) / (h * h);
        }
        const double scale = std::max({std::abs(vt), std::abs(sol.rho * lap), 1e-3});
        REQUIRE(std::abs(vt - sol.rho * lap) / scale < 1e-5);
      }
    }
  }
}

TEST_CASE("error norms") {
  SECTION("a single deviation is returned as is") {
    const double deviations[] = {0.3};
    const auto h = scalar_history(0.4, deviations);
    REQUIRE(l2_error(h.mean, h.sol, h.cloud) == Catch::Approx(0.3).epsilon(1e-12));
    REQUIRE(linf_error(h.mean, h.sol, h.cloud) ==
            Catch::Approx(0.3).epsilon(1e-12));
  }
  SECTION("the sup norm picks the largest magnitude") {
    const double deviations[] = {0.1, -0.4, 0.2};
    const auto h = scalar_history(0.25, deviations);
    REQUIRE(linf_error(h.mean, h.sol, h.cloud) ==
            Catch::Approx(0.4).epsilon(1e-12));
    REQUIRE(linf_error(h.mean, h.sol, h.cloud, true) ==
            Catch::Approx(0.2).epsilon(1e-12));
    const double expected_l2 = std::sqrt((0.01 + 0.16 + 0.04) / 3.0);
    REQUIRE(l2_error(h.mean, h.sol, h.cloud) ==
            Catch::Approx(expected_l2).epsilon(1e-12));
  }
  SECTION("the initial level is excluded") {
    const double deviations[] = {0.0};
    auto h = scalar_history(1.0, deviations);
    h.mean.mean[0] += 100.0;  // corrupt t = 0 only
    REQUIRE(l2_error(h.mean, h.sol, h.cloud) == Catch::Approx(0.0).margin(1e-15));
    REQUIRE(linf_error(h.mean, h.sol, h.cloud) == Catch::Approx(0.0).margin(1e-15));
  }
  SECTION("node order does not matter") {
    const auto disc = line_discretization(5, 2);
    const auto spec =
        make_problem_spec(ProblemId::diffusion1d, 0.005, 0.5, 1.0, 0.25);
    EnsembleConfig config;
    config.realizations = 4;
    config.master_seed = 31337;
    const auto mean = run_ensemble(disc.cloud, disc.stencils, spec, config);
    const AnalyticSolution sol{ProblemId::diffusion1d, 0.005};

    const std::vector<int> perm = {3, 0, 4, 1, 2};
    std::vector<double> coords;
    std::vector<NodeRole> roles;
    for (int i : perm) {
      coords.push_back(disc.cloud.coord(i, 0));
      roles.push_back(disc.cloud.role(i));
    }
    PointCloud permuted(disc.cloud.domain(), std::move(coords), std::move(roles));
    MeanField permuted_mean = mean;
    for (int k = 0; k <= mean.step_count; ++k)
      for (size_t c = 0; c < perm.size(); ++c)
        permuted_mean.mean[static_cast<size_t>(k) * 5 + c] =
            mean.row(k)[static_cast<size_t>(perm[c])];

    REQUIRE(linf_error(permuted_mean, sol, permuted) ==
            linf_error(mean, sol, disc.cloud));
    REQUIRE(l2_error(permuted_mean, sol, permuted) ==
            Catch::Approx(l2_error(mean, sol, disc.cloud)).epsilon(1e-12));
  }
  SECTION("the mean must match the cloud") {
    const double deviations[] = {0.3};
    const auto h = scalar_history(0.4, deviations);
    const auto other = generate_regular_grid(Domain::unit_box(1), 3);
    REQUIRE_THROWS_AS(l2_error(h.mean, h.sol, other), InvalidArgument);
    REQUIRE_THROWS_AS(linf_error(h.mean, h.sol, other), InvalidArgument);
  }
}

TEST_CASE("ensemble overflow diagnostics") {
  const auto disc = line_discretization(11, 2);
  ProblemSpec spec;
  spec.rho = 0.01;
  spec.mu = 0.1;
  spec.final_time = 600.0;
  spec.dt = 1.0;  // product 2.0, firmly unstable
  spec.initial = [](std::span<const double> x) { return std::sin(M_PI * x[0]); };
  spec.boundary = [](std::span<const double>, double) { return 0.0; };

  EnsembleConfig config;
  config.realizations = 4;
  config.master_seed = 808;
  SECTION("an unstable ensemble refuses to start") {
    REQUIRE_THROWS_AS(run_ensemble(disc.cloud, disc.stencils, spec, config),
                      StabilityError);
  }
  SECTION("a forced run reports which realization overflowed") {
    config.force_unstable = true;
    try {
      run_ensemble(disc.cloud, disc.stencils, spec, config);
      FAIL("expected an overflow");
    } catch (const EnsembleOverflowError& e) {
      REQUIRE(e.realization() == 0);
      REQUIRE(e.seed() == realization_seed(808, 0));
      REQUIRE(e.step() > 0);
    }
  }
}

TEST_CASE("automatic time step selection") {
  auto stencil_with_theta = [](double theta_c) {
    LaplacianStencil s;
    s.center = 1;
    s.neighbors = {0, 2};
    s.coeffs = {theta_c / 2.0, theta_c / 2.0};
    s.center_coeff = theta_c;
    return s;
  };

  SECTION("a lax bound is clamped to one step") {
    const std::vector<LaplacianStencil> stencils = {stencil_with_theta(0.1)};
    REQUIRE(resolve_auto_dt(1.0, stencils, 1.0, 1.0) == 1.0);
  }
  SECTION("an exact divisor is kept") {
    const std::vector<LaplacianStencil> stencils = {stencil_with_theta(2.0)};
    const double dt = resolve_auto_dt(1.0, stencils, 1.0, 1.0);
    REQUIRE(dt == 0.5);
    REQUIRE(check_stability(1.0, dt, stencils).product == 1.0);
  }
  SECTION("a non-divisor is shrunk to the next one") {
    const std::vector<LaplacianStencil> stencils = {stencil_with_theta(10.0 / 3.0)};
    REQUIRE(resolve_auto_dt(1.0, stencils, 1.0, 1.0) == 0.25);
  }
  SECTION("the safety factor scales the raw step") {
    const std::vector<LaplacianStencil> stencils = {stencil_with_theta(2.0)};
    REQUIRE(resolve_auto_dt(1.0, stencils, 1.0, 0.5) == 0.25);
  }
}

TEST_CASE("benchmark cases") {
  const auto cloud = generate_regular_grid(Domain::unit_box(1), 9);
  StudyConfig study;
  study.rho = 0.005;
  study.mu = 0.1;
  study.weight = WeightSpec{WeightKind::potential, 3.0};
  study.pinned_dt = 0.125;
  EnsembleConfig ensemble;
  ensemble.realizations = 8;
  ensemble.master_seed = 7;

  SECTION("a run fills in the full report") {
    const auto result = run_case(ProblemId::diffusion1d, cloud, study, ensemble);
    REQUIRE(result.report.problem == "diffusion1d");
    REQUIRE(result.report.node_count == 9);
    REQUIRE(result.report.star_size == 4);
    REQUIRE(result.report.weight.kind == WeightKind::potential);
    REQUIRE(result.report.rho == 0.005);
    REQUIRE(result.report.mu == 0.1);
    REQUIRE(result.report.dt == 0.125);
    REQUIRE(result.report.step_count == 8);
    REQUIRE(result.report.realizations == 8);
    REQUIRE(result.report.seed == 7);
    REQUIRE(result.stability.pass);
    REQUIRE(result.mean.step_count == 8);
    REQUIRE(std::isfinite(result.report.l2));
    REQUIRE(result.report.l2 > 0.0);
    REQUIRE(result.report.linf >= result.report.l2);
    REQUIRE(result.report.linf < 0.5);
  }
  SECTION("a study over one cloud is one case") {
    const auto result = run_case(ProblemId::diffusion1d, cloud, study, ensemble);
    const std::vector<PointCloud> clouds = {cloud};
    const auto reports =
        convergence_study(ProblemId::diffusion1d, clouds, study, ensemble);
    REQUIRE(reports.size() == 1);
    REQUIRE(reports[0].l2 == result.report.l2);
    REQUIRE(reports[0].linf == result.report.linf);
  }
  SECTION("dimension mismatch is rejected") {
    REQUIRE_THROWS_AS(run_case(ProblemId::diffusion2d, cloud, study, ensemble),
                      InvalidArgument);
    const std::vector<PointCloud> none;
    REQUIRE_THROWS_AS(
        convergence_study(ProblemId::diffusion1d, none, study, ensemble),
        InvalidArgument);
  }
  SECTION("a pinned unstable step is rejected up front") {
    StudyConfig bad = study;
    bad.rho = 0.01;
    bad.pinned_dt = 1.0;  // product well above 1 on this grid
    REQUIRE_THROWS_AS(run_case(ProblemId::diffusion1d, cloud, bad, ensemble),
                      StabilityError);
  }
}
