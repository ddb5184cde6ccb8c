#include "rmp/rng.hpp"

#include <cmath>
#include <numbers>

namespace rmp {

double RngStream::gaussian() {
  // Box-Muller; u1 nudged away from 0 so the log is finite.
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1 + 0x1.0p-54));
  return r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace rmp
