#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "deltagreen/spectrum.hpp"
#include "deltagreen/types.hpp"

namespace deltagreen {

// Random strengths uniform in [strength_min, strength_max]; positions j*spacing plus a uniform
// jitter in [-position_jitter, position_jitter]. A pure function of the seed.
struct RandomComb {
  std::uint64_t seed = 0;
  double strength_min = 0.0;
  double strength_max = 0.0;
  double position_jitter = 0.0;
};

// A finite delta comb on the free line. Strengths come from exactly one of: `strength`
// (uniform), `strengths` (explicit, length count) or `random`. Positions are explicit or j*spacing.
struct CombSpec {
  std::size_t count = 1;
  double spacing = 1.0;
  std::optional<double> strength;
  std::vector<double> strengths;
  std::vector<double> positions;
  std::optional<RandomComb> random;

  bool is_uniform_periodic() const;
};

// Impurities in ascending position order.
DecoratedSystem build_comb(const CombSpec& spec);

// cos(qL) of the infinite comb: cosh(kL) + s/(2k) sinh(kL) for E = -k^2 < 0 and
// cos(kL) + s/(2k) sin(kL) for E = k^2 > 0, written through entire functions of E L^2 so it is
// continuous at E = 0. E lies in a band iff |c| <= 1.
double kp_dispersion(double strength, double spacing, double energy);

// Maximal intervals of [e_lo, e_hi] with |c| <= 1; interior edges refined by bisection.
std::vector<Interval> kp_bands(double strength, double spacing, double e_lo, double e_hi,
                               std::size_t samples = 4000);

struct BandReport {
  std::vector<double> roots;             // finite-comb zeros of D, ascending
  std::vector<Interval> bands;           // roots clustered at gaps > 5x the median gap
  std::vector<int> band_index;           // cluster of each root
  std::vector<Interval> analytic_bands;  // empty unless the comb is uniform and periodic
  std::vector<bool> in_band;             // root strictly inside an analytic band
  std::optional<std::uint64_t> seed;

  double distance_to_band(double e) const;  // 0 inside, infinity without analytic bands
  double interior_fraction_in_band() const; // over all roots except the lowest and highest
};

// Bound-state band of a finite comb: e_hi may be 0 (the analytic edges are computed up to e_hi,
// the root scan stops at the continuum guard).
BandReport finite_band_roots(const CombSpec& spec, double e_lo, double e_hi,
                             const SpectrumOptions& options = {});

}  // namespace deltagreen
