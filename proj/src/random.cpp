#include "artic/random.hpp"

#include <cmath>

namespace artic {

double PortableRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PortableRng::normal() {
  constexpr double kTwoPi = 6.283185307179586476925;
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace artic
