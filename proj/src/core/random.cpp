#include "xray/core/random.hpp"

#include <cmath>

#include "xray/core/geometry.hpp"

namespace xray {

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

}  // namespace xray
