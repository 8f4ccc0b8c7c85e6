#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "deltagreen/base_green.hpp"
#include "deltagreen/types.hpp"

namespace testsupport {

using namespace deltagreen;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::mt19937_64& engine() { return rng_; }

  BaseSystem base() {
    switch (integer(0, 2)) {
      case 0: return BaseSystem::free_line();
      case 1: return BaseSystem::box(uniform(1.0, 5.0));
      default: return BaseSystem::harmonic_oscillator(400);
    }
  }

  double position(const BaseSystem& base) {
    if (const auto* box = std::get_if<Box>(&base.kind())) return uniform(0.05, 0.95) * box->length;
    return uniform(-3.0, 3.0);
  }

  double strength() {
    double s = 0.0;
    while (std::abs(s) < 0.05) s = uniform(-3.0, 3.0);
    return s;
  }

  // Real energy a safe distance from every base pole, or complex with a small positive shift.
  EnergyArg energy(const BaseSystem& base) {
    for (;;) {
      const bool complex_arg = integer(0, 3) == 0;
      const double re = uniform(-6.0, 12.0);
      if (complex_arg) return EnergyArg(re, uniform(1e-3, 0.5));
      if (base.is_free_line()) {
        if (re < -0.01) return EnergyArg(re);
        continue;
      }
      const BaseSpectrum spec = base_spectrum(base, re - 1.0, re + 1.0);
      bool clear = true;
      for (double p : spec.poles) clear = clear && std::abs(re - p) > 0.05;
      if (clear) return EnergyArg(re);
    }
  }

  DecoratedSystem system(const BaseSystem& base, std::size_t n) {
    DecoratedSystem sys{base, {}};
    for (std::size_t j = 0; j < n; ++j) sys.impurities.push_back({position(base), strength()});
    return sys;
  }

 private:
  std::mt19937_64 rng_;
};

inline double rel_diff(complex a, complex b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace testsupport
