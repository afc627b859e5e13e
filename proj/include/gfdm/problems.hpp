#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "gfdm/errors.hpp"
#include "gfdm/geometry.hpp"
#include "gfdm/sde.hpp"

namespace gfdm {

// Built-in benchmark problems on unit boxes. Each has a closed-form expected
// solution, which is what ensemble averages are compared against:
//   diffusion1d: E v = exp(-rho pi^2 t) sin(pi x),               F = 0
//   diffusion2d: E v = exp(-rho t / 2) sin((x + y) / 2),         F = E v
//   diffusion3d: E v = exp(-3 rho pi^2 t) sin(pi x) sin(pi y) sin(pi z),
//                                                               F = E v
enum class ProblemId { diffusion1d, diffusion2d, diffusion3d };

inline const char* to_string(ProblemId id) {
  switch (id) {
    case ProblemId::diffusion1d: return "diffusion1d";
    case ProblemId::diffusion2d: return "diffusion2d";
    case ProblemId::diffusion3d: return "diffusion3d";
  }
  return "?";
}

inline ProblemId parse_problem_id(const std::string& name) {
  if (name == "diffusion1d") return ProblemId::diffusion1d;
  if (name == "diffusion2d") return ProblemId::diffusion2d;
  if (name == "diffusion3d") return ProblemId::diffusion3d;
  throw InvalidArgument("unknown problem \"" + name +
                        "\"; expected diffusion1d, diffusion2d, or diffusion3d");
}

inline int problem_dim(ProblemId id) {
  switch (id) {
    case ProblemId::diffusion1d: return 1;
    case ProblemId::diffusion2d: return 2;
    case ProblemId::diffusion3d: return 3;
  }
  return 0;
}

inline Domain problem_domain(ProblemId id) {
  return Domain::unit_box(problem_dim(id));
}

// Reference parameters the benchmarks are usually run with.
inline double default_rho(ProblemId id) {
  switch (id) {
    case ProblemId::diffusion1d: return 0.005;
    case ProblemId::diffusion2d: return 0.01;
    case ProblemId::diffusion3d: return 1.0;
  }
  return 0.0;
}

inline double default_mu(ProblemId id) {
  switch (id) {
    case ProblemId::diffusion1d: return 0.1;
    case ProblemId::diffusion2d: return 0.1;
    case ProblemId::diffusion3d: return 0.5;
  }
  return 0.0;
}

// Expected solution E v(x, t) of a built-in problem at diffusivity rho.
struct AnalyticSolution {
  ProblemId id = ProblemId::diffusion1d;
  double rho = 0.0;
};

inline double analytic_eval(const AnalyticSolution& sol, std::span<const double> x,
                            double t) {
  const double pi = std::numbers::pi;
  switch (sol.id) {
    case ProblemId::diffusion1d:
      return std::exp(-sol.rho * pi * pi * t) * std::sin(pi * x[0]);
    case ProblemId::diffusion2d:
      return std::exp(-0.5 * sol.rho * t) * std::sin(0.5 * (x[0] + x[1]));
    case ProblemId::diffusion3d:
      return std::exp(-3.0 * sol.rho * pi * pi * t) * std::sin(pi * x[0]) *
             std::sin(pi * x[1]) * std::sin(pi * x[2]);
  }
  throw InvalidArgument("unknown problem id");
}

// ProblemSpec with initial and boundary data wired to the expected solution.
// The 1D problem has homogeneous Dirichlet data and uses an exact zero.
inline ProblemSpec make_problem_spec(ProblemId id, double rho, double mu,
                                     double final_time, double dt) {
  ProblemSpec spec;
  spec.rho = rho;
  spec.mu = mu;
  spec.final_time = final_time;
  spec.dt = dt;
  const AnalyticSolution sol{id, rho};
  spec.initial = [sol](std::span<const double> x) {
    return analytic_eval(sol, x, 0.0);
  };
  if (id == ProblemId::diffusion1d) {
    spec.boundary = [](std::span<const double>, double) { return 0.0; };
  } else {
    spec.boundary = [sol](std::span<const double> x, double t) {
      return analytic_eval(sol, x, t);
    };
  }
  return spec;
}

}  // namespace gfdm
