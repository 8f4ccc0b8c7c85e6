#include "deltagreen/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "deltagreen/base_green.hpp"
#include "deltagreen/errors.hpp"
#include "deltagreen/impurity_solver.hpp"
#include "deltagreen/parallel.hpp"

namespace deltagreen {

namespace {

constexpr double kGolden = 0.6180339887498949;
constexpr int kMaxGoldenSteps = 200;

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

void check_options(const SpectrumOptions& o) {
  require(o.samples >= 16, "scan needs at least 16 samples");
  require(o.tol >= 1e-12, "root tolerance must be >= 1e-12");
  require(o.marginal_threshold >= 0.0 && o.exclusion_factor >= 1.0 && o.continuum_guard > 0.0,
          "invalid spectrum options");
}

struct ExtremumResult {
  std::optional<double> split;  // point where D crossed to the other sign
  double best_e = 0.0;
  double best_abs = 0.0;
  Interval final_interval;
};

// Golden-section minimisation of s * D on [lo, hi].
template <class F>
ExtremumResult refine_extremum(const F& d, double lo, double hi, int s, double tol) {
  ExtremumResult r;
  double a = lo;
  double c = hi;
  double x1 = c - kGolden * (c - a);
  double x2 = a + kGolden * (c - a);
  double f1 = s * d(x1);
  double f2 = s * d(x2);
  for (int step = 0; step < kMaxGoldenSteps; ++step) {
    if (f1 < 0.0) {
      r.split = x1;
      return r;
    }
    if (f2 < 0.0) {
      r.split = x2;
      return r;
    }
    if (c - a <= tol) break;
    if (f1 < f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - kGolden * (c - a);
      f1 = s * d(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (c - a);
      f2 = s * d(x2);
    }
  }
  r.best_e = f1 < f2 ? x1 : x2;
  r.best_abs = std::min(f1, f2);
  r.final_interval = {a, c};
  return r;
}

struct Bisected {
  double root;
  Interval bracket;
};

template <class F>
Bisected bisect(const F& d, Interval br, double tol) {
  double lo = br.lo;
  double hi = br.hi;
  double flo = d(lo);
  double fhi = d(hi);
  if (flo == 0.0) return {lo, {lo, lo}};
  if (fhi == 0.0) return {hi, {hi, hi}};
  while (hi - lo > tol) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double fm = d(mid);
    if (fm == 0.0) return {mid, {mid, mid}};
    if (sign_of(fm) == sign_of(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  double root = lo - flo * (hi - lo) / (fhi - flo);
  if (!(root >= lo && root <= hi)) root = lo + 0.5 * (hi - lo);
  return {root, {lo, hi}};
}

double lowest_root(const SpectrumReport& report) {
  for (const auto& r : report.roots)
    if (!r.marginal) return r.energy;
  return std::numeric_limits<double>::quiet_NaN();
}

double hausdorff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  auto directed = [](const std::vector<double>& from, const std::vector<double>& to) {
    double worst = 0.0;
    for (double x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (double y : to) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

}  // namespace

std::vector<double> SpectrumReport::energies(bool include_marginal) const {
  std::vector<double> out;
  for (const auto& r : roots)
    if (include_marginal || !r.marginal) out.push_back(r.energy);
  return out;
}

DeterminantProfile scan_determinant(const DecoratedSystem& sys, double e_lo, double e_hi,
                                    const SpectrumOptions& options) {
  check_options(options);
  require(std::isfinite(e_lo) && std::isfinite(e_hi) && e_lo < e_hi, "scan needs e_lo < e_hi");
  if (sys.base.is_free_line()) e_hi = std::min(e_hi, -options.continuum_guard);
  if (!(e_lo < e_hi)) fail(ErrorCode::EmptyRange, "scan range is empty below the continuum");

  const DeterminantEvaluator det(sys);
  DeterminantProfile prof;
  prof.e_lo = e_lo;
  prof.e_hi = e_hi;

  const KernelOptions& kopt = sys.base.options();
  const double reach = options.exclusion_factor * kopt.pole_half_width(std::max(std::abs(e_lo), std::abs(e_hi)));
  for (double p : base_spectrum(sys.base, e_lo - reach, e_hi + reach).poles) {
    const double half = options.exclusion_factor * kopt.pole_half_width(p);
    prof.exclusions.push_back({std::max(p - half, e_lo), std::min(p + half, e_hi)});
  }
  auto excluded = [&](double e) {
    for (const auto& iv : prof.exclusions)
      if (iv.contains(e)) return true;
    return false;
  };

  std::vector<double> grid;
  const std::size_t n = options.samples;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = (i + 1 == n) ? e_hi : e_lo + (e_hi - e_lo) * static_cast<double>(i) / (n - 1);
    if (!excluded(e)) grid.push_back(e);
  }
  // segment edges next to every exclusion, nudged outward so the kernel accepts them
  for (const auto& iv : prof.exclusions) {
    for (double edge : {std::nextafter(iv.lo, -INFINITY), std::nextafter(iv.hi, INFINITY)}) {
      if (edge > e_lo && edge < e_hi && !excluded(edge)) grid.push_back(edge);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) fail(ErrorCode::EmptyRange, "no scan points survive the pole exclusions");

  prof.energies = grid;
  prof.values.assign(grid.size(), 0.0);
  parallel_for(grid.size(), options.threads, [&](std::size_t i) { prof.values[i] = det.real(grid[i]); });

  // segment index: number of exclusions lying entirely to the left
  std::vector<std::size_t> segment(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (const auto& iv : prof.exclusions)
      if (iv.hi < grid[i]) ++segment[i];

  auto d = [&](double e) { return det.real(e); };
  const auto& v = prof.values;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (v[i] == 0.0) {
      prof.brackets.push_back({grid[i], grid[i]});
      continue;
    }
    if (i + 1 < grid.size() && segment[i + 1] == segment[i] && v[i + 1] != 0.0 &&
        sign_of(v[i]) != sign_of(v[i + 1])) {
      prof.brackets.push_back({grid[i], grid[i + 1]});
    }
    if (i == 0 || i + 1 >= grid.size()) continue;
    if (segment[i - 1] != segment[i] || segment[i + 1] != segment[i]) continue;
    const int s = sign_of(v[i]);
    if (sign_of(v[i - 1]) != s || sign_of(v[i + 1]) != s) continue;
    if (!(s * v[i] < s * v[i - 1] && s * v[i] <= s * v[i + 1])) continue;

    const ExtremumResult ext = refine_extremum(d, grid[i - 1], grid[i + 1], s, options.tol);
    if (ext.split) {
      prof.brackets.push_back({grid[i - 1], *ext.split});
      prof.brackets.push_back({*ext.split, grid[i + 1]});
    } else if (ext.best_abs < options.marginal_threshold) {
      prof.marginal.push_back(ext.final_interval);
    }
  }
  auto by_lo = [](const Interval& a, const Interval& b) { return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi); };
  std::sort(prof.brackets.begin(), prof.brackets.end(), by_lo);
  std::sort(prof.marginal.begin(), prof.marginal.end(), by_lo);
  return prof;
}

SpectrumReport find_spectrum(const DecoratedSystem& sys, double e_lo, double e_hi,
                             const SpectrumOptions& options) {
  const DeterminantProfile prof = scan_determinant(sys, e_lo, e_hi, options);
  const DeterminantEvaluator det(sys);
  auto d = [&](double e) { return det.real(e); };

  SpectrumReport report;
  report.e_lo = prof.e_lo;
  report.e_hi = prof.e_hi;
  report.samples = options.samples;
  report.exclusions = prof.exclusions;
  for (const auto& br : prof.brackets) {
    const Bisected b = bisect(d, br, options.tol);
    report.roots.push_back({b.root, b.bracket.width(), std::abs(d(b.root)), false, std::nullopt});
  }
  for (const auto& iv : prof.marginal) {
    const double e = iv.lo + 0.5 * iv.width();
    report.roots.push_back({e, iv.width(), std::abs(d(e)), true, std::nullopt});
  }
  std::sort(report.roots.begin(), report.roots.end(),
            [](const SpectralRoot& a, const SpectralRoot& b) { return a.energy < b.energy; });
  return report;
}

CoalescenceTable coalescence_sweep(const BaseSystem& base, double position, double first_strength,
                                   double second_strength, std::span<const double> offsets,
                                   double e_lo, double e_hi, const SpectrumOptions& options) {
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    require(offsets[i] >= 0.0, "coalescence offsets must be non-negative");
    require(i == 0 || offsets[i] < offsets[i - 1], "coalescence offsets must be strictly descending");
  }
  CoalescenceTable table;
  const DecoratedSystem combined{base, {{position, first_strength + second_strength}}};
  table.combined_root = lowest_root(find_spectrum(combined, e_lo, e_hi, options));
  for (double eps : offsets) {
    const DecoratedSystem pair{base, {{position, first_strength}, {position + eps, second_strength}}};
    table.rows.push_back({eps, lowest_root(find_spectrum(pair, e_lo, e_hi, options))});
  }
  return table;
}

DecouplingTable decoupling_sweep(double first_strength, double second_strength,
                                 std::span<const double> separations, double e_lo, double e_hi,
                                 const SpectrumOptions& options) {
  for (std::size_t i = 0; i < separations.size(); ++i) {
    require(separations[i] > 0.0, "separations must be positive");
    require(i == 0 || separations[i] > separations[i - 1], "separations must be ascending");
  }
  const BaseSystem line = BaseSystem::free_line();
  DecouplingTable table;
  table.first_roots = find_spectrum({line, {{0.0, first_strength}}}, e_lo, e_hi, options).energies(false);
  table.second_roots = find_spectrum({line, {{0.0, second_strength}}}, e_lo, e_hi, options).energies(false);
  std::vector<double> reference = table.first_roots;
  reference.insert(reference.end(), table.second_roots.begin(), table.second_roots.end());
  std::sort(reference.begin(), reference.end());

  for (double sep : separations) {
    const DecoratedSystem pair{line, {{0.0, first_strength}, {sep, second_strength}}};
    DecouplingRow row;
    row.separation = sep;
    row.roots = find_spectrum(pair, e_lo, e_hi, options).energies(false);
    row.deviation = hausdorff(row.roots, reference);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace deltagreen
