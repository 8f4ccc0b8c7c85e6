#pragma once

#include <optional>
#include <span>
#include <vector>

#include "deltagreen/types.hpp"

namespace deltagreen {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double e) const { return e >= lo && e <= hi; }
};

struct SpectrumOptions {
  std::size_t samples = 2000;
  double tol = 1e-10;
  unsigned threads = 0;              // 0: all hardware threads
  double marginal_threshold = 1e-8;  // |D| below this at a sign-preserving extremum -> marginal
  double exclusion_factor = 2.0;     // scan exclusion half-width in units of the kernel pole window
  double continuum_guard = 1e-6;     // free-line scans stop at E = -continuum_guard
};

// Re D sampled on a uniform grid with the base poles cut out.
struct DeterminantProfile {
  double e_lo = 0.0;
  double e_hi = 0.0;
  std::vector<double> energies;
  std::vector<double> values;
  std::vector<Interval> exclusions;
  std::vector<Interval> brackets;  // each holds one sign change of D
  std::vector<Interval> marginal;  // near-zero extrema of |D| with no sign change
};

// Samples D on the grid, brackets sign changes inside each pole-free segment, and refines
// every sign-preserving extremum of D by golden section: a dip through zero becomes two
// brackets, a near-zero touch becomes a marginal entry.
DeterminantProfile scan_determinant(const DecoratedSystem& sys, double e_lo, double e_hi,
                                    const SpectrumOptions& options = {});

struct SpectralRoot {
  double energy = 0.0;
  double bracket_width = 0.0;
  double abs_d = 0.0;
  bool marginal = false;
  std::optional<double> oracle_deviation;
};

struct SpectrumReport {
  double e_lo = 0.0;
  double e_hi = 0.0;
  std::size_t samples = 0;
  std::vector<Interval> exclusions;
  std::vector<SpectralRoot> roots;  // ascending

  std::vector<double> energies(bool include_marginal = true) const;
};

// Bisection of every bracket to width <= tol. The reported energy is the secant point of the
// final bracket, which lies inside it.
SpectrumReport find_spectrum(const DecoratedSystem& sys, double e_lo, double e_hi,
                             const SpectrumOptions& options = {});

struct CoalescenceRow {
  double offset = 0.0;
  double lowest_root = 0.0;  // NaN when no root was found
};

struct CoalescenceTable {
  double combined_root = 0.0;  // lowest zero of 1 - (l + m) G0(a, a; E)
  std::vector<CoalescenceRow> rows;
};

// Impurities (a, l) and (a + offset, m) for each offset; offsets must be >= 0 and strictly
// descending.
CoalescenceTable coalescence_sweep(const BaseSystem& base, double position, double first_strength,
                                   double second_strength, std::span<const double> offsets,
                                   double e_lo, double e_hi, const SpectrumOptions& options = {});

struct DecouplingRow {
  double separation = 0.0;
  std::vector<double> roots;
  double deviation = 0.0;  // Hausdorff distance between roots and the decoupled reference set
};

struct DecouplingTable {
  std::vector<double> first_roots;   // first impurity alone
  std::vector<double> second_roots;  // second impurity alone
  std::vector<DecouplingRow> rows;
};

// Free line, impurities at 0 and at each separation (ascending, > 0).
DecouplingTable decoupling_sweep(double first_strength, double second_strength,
                                 std::span<const double> separations, double e_lo, double e_hi,
                                 const SpectrumOptions& options = {});

}  // namespace deltagreen
