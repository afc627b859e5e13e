#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gfdm/errors.hpp"
#include "gfdm/stars.hpp"

namespace gfdm {

enum class WeightKind { potential, exponential, cubic_spline };

inline const char* to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::potential: return "potential";
    case WeightKind::exponential: return "exponential";
    case WeightKind::cubic_spline: return "cubic_spline";
  }
  return "?";
}

inline WeightKind parse_weight_kind(const std::string& name) {
  if (name == "potential") return WeightKind::potential;
  if (name == "exponential") return WeightKind::exponential;
  if (name == "cubic_spline") return WeightKind::cubic_spline;
  throw InvalidArgument("unknown weight kind \"" + name +
                        "\"; expected potential, exponential, or cubic_spline");
}

// Weight family plus its exponent. The exponent is ignored by the spline.
struct WeightSpec {
  WeightKind kind = WeightKind::potential;
  double exponent = 3.0;
};

// Distance weight w(delta). `delta_max` is the star radius; only the spline
// uses it, through s = delta / delta_max:
//   potential     delta^-n
//   exponential   exp(-n * delta^2)
//   cubic_spline  2/3 - 4s^2 + 4s^3          for s <= 1/2
//                 4/3 - 4s + 4s^2 - 4s^3/3   for 1/2 < s <= 1
//                 0                          past the star radius
inline double weight(const WeightSpec& spec, double delta, double delta_max) {
  if (!(delta > 0.0))
    throw InvalidArgument("weights are defined for positive distances");
  switch (spec.kind) {
    case WeightKind::potential:
      if (!(spec.exponent > 0.0))
        throw InvalidArgument("potential weight needs a positive exponent");
      return std::pow(delta, -spec.exponent);
    case WeightKind::exponential:
      if (!(spec.exponent > 0.0))
        throw InvalidArgument("exponential weight needs a positive exponent");
      return std::exp(-spec.exponent * delta * delta);
    case WeightKind::cubic_spline: {
      if (!(delta_max > 0.0))
        throw InvalidArgument("cubic spline weight needs a positive star radius");
      const double s = delta / delta_max;
      if (s <= 0.5) return 2.0 / 3.0 - 4.0 * s * s + 4.0 * s * s * s;
      if (s <= 1.0)
        return 4.0 / 3.0 - 4.0 * s + 4.0 * s * s - (4.0 / 3.0) * s * s * s;
      return 0.0;
    }
  }
  throw InvalidArgument("unknown weight kind");
}

// Weights for every neighbor of a star, against the star's own radius.
inline std::vector<double> star_weights(const WeightSpec& spec, const Star& star) {
  std::vector<double> w;
  w.reserve(star.distances.size());
  for (double delta : star.distances) w.push_back(weight(spec, delta, star.radius));
  return w;
}

}  // namespace gfdm
