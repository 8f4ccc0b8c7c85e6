#include "deltagreen/kronig_penney.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "deltagreen/errors.hpp"

namespace deltagreen {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double band_gap_function(double strength, double spacing, double e) {
  return std::abs(kp_dispersion(strength, spacing, e)) - 1.0;
}

}  // namespace

bool CombSpec::is_uniform_periodic() const {
  return strength.has_value() && positions.empty() && !random;
}

DecoratedSystem build_comb(const CombSpec& spec) {
  require(spec.count >= 1, "comb needs at least one impurity");
  require(std::isfinite(spec.spacing) && spec.spacing > 0.0, "comb spacing must be positive");
  const int sources = spec.strength.has_value() + !spec.strengths.empty() + spec.random.has_value();
  require(sources == 1, "comb strengths need exactly one of strength, strengths, random");
  require(spec.strengths.empty() || spec.strengths.size() == spec.count,
          "explicit strengths must have one entry per impurity");
  require(spec.positions.empty() || spec.positions.size() == spec.count,
          "explicit positions must have one entry per impurity");

  std::vector<double> strengths(spec.count);
  std::vector<double> positions(spec.count);
  for (std::size_t j = 0; j < spec.count; ++j)
    positions[j] = spec.positions.empty() ? static_cast<double>(j) * spec.spacing : spec.positions[j];

  if (spec.strength) {
    std::fill(strengths.begin(), strengths.end(), *spec.strength);
  } else if (!spec.strengths.empty()) {
    strengths = spec.strengths;
  } else {
    const RandomComb& r = *spec.random;
    require(r.strength_min <= r.strength_max && r.position_jitter >= 0.0,
            "invalid random comb distribution");
    std::mt19937_64 rng(r.seed);
    for (std::size_t j = 0; j < spec.count; ++j) {
      strengths[j] = r.strength_min + (r.strength_max - r.strength_min) * uniform01(rng);
      if (r.position_jitter > 0.0) positions[j] += r.position_jitter * (2.0 * uniform01(rng) - 1.0);
    }
  }

  std::vector<Impurity> imps(spec.count);
  for (std::size_t j = 0; j < spec.count; ++j) {
    if (!std::isfinite(strengths[j]) || !std::isfinite(positions[j]))
      fail(ErrorCode::InvalidArgument, "comb impurity " + std::to_string(j) + " is not finite");
    imps[j] = {positions[j], strengths[j]};
  }
  std::stable_sort(imps.begin(), imps.end(),
                   [](const Impurity& a, const Impurity& b) { return a.position < b.position; });
  return {BaseSystem::free_line(), std::move(imps)};
}

double kp_dispersion(double strength, double spacing, double energy) {
  const double u = -energy * spacing * spacing;  // (kappa L)^2
  const double half = 0.5 * strength * spacing;
  double c_part = 0.0;
  double s_part = 0.0;  // sinh(z)/z
  if (std::abs(u) < 1e-3) {
    double term_c = 1.0;
    double term_s = 1.0;
    c_part = 1.0;
    s_part = 1.0;
    for (int k = 1; k < 10; ++k) {
      term_c *= u / ((2.0 * k - 1.0) * (2.0 * k));
      term_s *= u / ((2.0 * k) * (2.0 * k + 1.0));
      c_part += term_c;
      s_part += term_s;
    }
  } else if (u > 0.0) {
    const double z = std::sqrt(u);
    if (z > 700.0) {
      const double lead = 1.0 + half / z;
      return lead == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), lead);
    }
    c_part = std::cosh(z);
    s_part = std::sinh(z) / z;
  } else {
    const double z = std::sqrt(-u);
    c_part = std::cos(z);
    s_part = std::sin(z) / z;
  }
  return c_part + half * s_part;
}

std::vector<Interval> kp_bands(double strength, double spacing, double e_lo, double e_hi,
                               std::size_t samples) {
  require(e_lo < e_hi && samples >= 16, "kp_bands needs e_lo < e_hi and >= 16 samples");
  auto f = [&](double e) { return band_gap_function(strength, spacing, e); };
  auto edge = [&](double a, double b) {
    double fa = f(a);
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
      const double m = a + 0.5 * (b - a);
      const double fm = f(m);
      if ((fm <= 0.0) == (fa <= 0.0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    return a + 0.5 * (b - a);
  };

  std::vector<Interval> bands;
  double prev_e = e_lo;
  bool prev_in = f(e_lo) <= 0.0;
  double open = prev_in ? e_lo : 0.0;
  for (std::size_t i = 1; i < samples; ++i) {
    const double e = (i + 1 == samples) ? e_hi : e_lo + (e_hi - e_lo) * static_cast<double>(i) / (samples - 1);
    const bool in = f(e) <= 0.0;
    if (in != prev_in) {
      const double x = edge(prev_e, e);
      if (in) {
        open = x;
      } else {
        bands.push_back({open, x});
      }
    }
    prev_in = in;
    prev_e = e;
  }
  if (prev_in) bands.push_back({open, e_hi});
  return bands;
}

double BandReport::distance_to_band(double e) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : analytic_bands) {
    if (b.contains(e)) return 0.0;
    best = std::min({best, std::abs(e - b.lo), std::abs(e - b.hi)});
  }
  return best;
}

double BandReport::interior_fraction_in_band() const {
  if (roots.size() < 3) return in_band.empty() ? 0.0 : static_cast<double>(std::count(in_band.begin(), in_band.end(), true)) / in_band.size();
  std::size_t hits = 0;
  for (std::size_t k = 1; k + 1 < roots.size(); ++k) hits += in_band[k];
  return static_cast<double>(hits) / static_cast<double>(roots.size() - 2);
}

BandReport finite_band_roots(const CombSpec& spec, double e_lo, double e_hi,
                             const SpectrumOptions& options) {
  require(e_hi <= 0.0, "band analysis covers bound states only (e_hi <= 0)");
  const DecoratedSystem sys = build_comb(spec);
  BandReport rep;
  if (spec.random) rep.seed = spec.random->seed;
  rep.roots = find_spectrum(sys, e_lo, e_hi, options).energies(false);

  // cluster into bands at gaps wider than 5x the median gap
  rep.band_index.assign(rep.roots.size(), 0);
  if (!rep.roots.empty()) {
    std::vector<double> gaps;
    for (std::size_t k = 1; k < rep.roots.size(); ++k) gaps.push_back(rep.roots[k] - rep.roots[k - 1]);
    double median = 0.0;
    if (!gaps.empty()) {
      std::vector<double> sorted = gaps;
      std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
      median = sorted[sorted.size() / 2];
    }
    Interval current{rep.roots.front(), rep.roots.front()};
    int band = 0;
    for (std::size_t k = 1; k < rep.roots.size(); ++k) {
      if (gaps[k - 1] > 5.0 * median) {
        rep.bands.push_back(current);
        current = {rep.roots[k], rep.roots[k]};
        ++band;
      } else {
        current.hi = rep.roots[k];
      }
      rep.band_index[k] = band;
    }
    rep.bands.push_back(current);
  }

  if (spec.is_uniform_periodic())
    rep.analytic_bands = kp_bands(*spec.strength, spec.spacing, e_lo, e_hi);
  rep.in_band.reserve(rep.roots.size());
  for (double r : rep.roots) {
    bool inside = false;
    for (const auto& b : rep.analytic_bands) inside = inside || (r > b.lo && r < b.hi);
    rep.in_band.push_back(inside);
  }
  return rep;
}

}  // namespace deltagreen
