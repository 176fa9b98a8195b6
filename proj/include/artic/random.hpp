#pragma once

#include <cstdint>
#include <random>

namespace artic {

/// Seeded generator with platform-independent output: std::mt19937_64 (its
/// sequence is fixed by the standard) plus hand-written distributions, since
/// the std:: distributions are implementation-defined.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller (no cached second value).
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace artic
