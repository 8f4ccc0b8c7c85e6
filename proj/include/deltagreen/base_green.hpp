#pragma once

#include <optional>
#include <span>
#include <vector>

#include "deltagreen/types.hpp"

namespace deltagreen {

// Free line: G0 = -exp(-kappa |x - x'|) / (2 kappa), kappa = principal sqrt(-E).
// Real E >= 0 needs an eta shift (ContinuumEvaluation otherwise).
complex free_line_g0(double x, double xp, EnergyArg energy);

// Dirichlet box [0, L]: G0 = -sin(k x<) sin(k (L - x>)) / (k sin kL), k = sqrt(E),
// evaluated in an overflow-free exponential form valid for any complex E.
complex box_g0(double x, double xp, EnergyArg energy, double length,
               const KernelOptions& options = {});

struct OscillatorValue {
  complex value;
  double tail_estimate = 0.0;
  bool reliable = true;
};

// H0 = -d^2/dx^2 + x^2, E_n = 2n + 1.
//
// The kernel is the spectral sum over n <= nmax, accelerated by subtracting the first
// `ho_subtractions` terms of its expansion around a reference energy E_r < 1:
//
//   G0(E) = sum_{k=1..m} (E_r - E)^{k-1} R_k + (E_r - E)^m sum_n psi_n psi_n' / ((E - E_n)(E_r - E_n)^m)
//
// with the moments R_k = sum_n psi_n psi_n' / (E_r - E_n)^k taken from the Mehler heat kernel
// by quadrature. The remaining sum decays like n^{-(m+3/2)}.
OscillatorValue ho_g0(double x, double xp, EnergyArg energy, int nmax,
                      const KernelOptions& options = {});

// psi_0..psi_nmax at x by the normalised three-term recurrence.
std::vector<double> hermite_functions(double x, int nmax);

// Heat kernel K(x, x'; t) = sum_n exp(-E_n t) psi_n(x) psi_n(x').
double mehler_kernel(double x, double xp, double t);

struct BaseSpectrum {
  std::vector<double> poles;                 // ascending, inside the requested range
  std::optional<double> continuum_threshold;
};

BaseSpectrum base_spectrum(const BaseSystem& base, double e_lo, double e_hi);

// Dispatch on the base kind. Oscillator tail estimates are dropped here; use PairKernel
// or ho_g0 when they matter.
complex eval_g0(const BaseSystem& base, double x, double xp, EnergyArg energy);

// G0(x, x'; .) with the energy-independent work done once. The impurity solver builds
// one per matrix entry and re-evaluates them across an energy scan.
class PairKernel {
 public:
  PairKernel(const BaseSystem& base, double x, double xp);

  complex operator()(EnergyArg energy) const { return evaluate(energy, nullptr); }
  // tail_estimate receives the oscillator truncation estimate (0 for exact kernels).
  complex evaluate(EnergyArg energy, double* tail_estimate) const;

  double x_lo() const { return x_lo_; }
  double x_hi() const { return x_hi_; }

 private:
  BaseSystem base_;
  double x_lo_;
  double x_hi_;
  // Oscillator only.
  std::vector<double> weights_;
  std::vector<double> poles_;
  std::vector<double> moments_;
};

namespace detail {

// Throws PoleWindow when energy is within the exclusion window of any pole in `poles`.
void check_pole_window(EnergyArg energy, std::span<const double> poles, const KernelOptions& options);

// Oscillator pieces exposed for tests.
std::vector<double> mehler_moments(double x, double xp, double reference_energy, int count);
double oscillator_tail_estimate(complex energy, double reference_energy, int subtractions, int nmax,
                                bool* formed);

}  // namespace detail

}  // namespace deltagreen
