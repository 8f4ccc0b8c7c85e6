#pragma once

#include <optional>
#include <vector>

#include "deltagreen/base_green.hpp"
#include "deltagreen/types.hpp"

namespace deltagreen {

// M_ij = delta_ij - strength_j * G0(a_i, a_j; E): the coefficient matrix of the linear system
// for the impurity-site values G(a_i, x'). The G0 block is symmetric, M in general is not.
struct ImpurityMatrix {
  std::size_t order = 0;
  EnergyArg energy;
  std::vector<complex> kernel;   // G0(a_i, a_j), row-major
  std::vector<complex> entries;  // M, row-major
  double tail_estimate = 0.0;

  complex g0(std::size_t i, std::size_t j) const { return kernel[i * order + j]; }
  complex at(std::size_t i, std::size_t j) const { return entries[i * order + j]; }
};

struct GreenValue {
  complex value;
  double condition_estimate = 1.0;  // ||M||_inf ||M^{-1}||_inf, >= 1
  double tail_estimate = 0.0;       // oscillator truncation estimate, 0 for exact kernels
};

ImpurityMatrix build_impurity_matrix(const DecoratedSystem& sys, EnergyArg energy);

// det M by pivoted elimination; 1 for N = 0. Its real zeros are the decorated spectrum.
complex determinant_d(const DecoratedSystem& sys, EnergyArg energy);

// Solves M g = (G0(a_i, x'))_i and returns G0(x, x') + sum_j strength_j G0(x, a_j) g_j.
// SingularMatrix when |det M| < 1e-14 * (Hadamard bound of M).
GreenValue decorated_green(const DecoratedSystem& sys, double x, double xp, EnergyArg energy);

// Two impurities, no linear solve: the site values solved by Cramer's rule and substituted
// back. Evaluated in a form that is exactly symmetric under x <-> x'.
// DegenerateD when |D| < 1e-14 * scale.
GreenValue decorated_green_pair_closed(const DecoratedSystem& sys, double x, double xp,
                                       EnergyArg energy);

// G0 + s G0(x,a) G0(a,x') / (1 - s G0(a,a)).
complex single_impurity_closed(const BaseSystem& base, const Impurity& imp, double x, double xp,
                               EnergyArg energy);

// [1 - l G0(a,a)][1 - m G0(b,b)] - l m G0(a,b)^2.
complex pair_determinant_closed(const BaseSystem& base, const Impurity& first, const Impurity& second,
                                EnergyArg energy);

// Literal expanded forms of the two-impurity Green function and the three-impurity determinant
// as commonly quoted, index slips included, compared against the linear-algebra results.
// A deviation is absent when the impurity count does not match its branch.
struct PrintedDeviation {
  std::optional<double> pair_green_deviation;          // max over probe pairs |G_printed - G| / max |G|
  std::optional<double> triple_determinant_deviation;  // |D_printed - det M| / (Hadamard bound of M)
};

PrintedDeviation printed_expansion_diagnostics(const DecoratedSystem& sys, EnergyArg energy);

complex printed_pair_green(const DecoratedSystem& sys, double x, double xp, EnergyArg energy);
complex printed_triple_determinant(const DecoratedSystem& sys, EnergyArg energy);

// Energy-independent kernel setup done once, for repeated determinant evaluation on a scan.
class DeterminantEvaluator {
 public:
  explicit DeterminantEvaluator(const DecoratedSystem& sys);

  std::size_t order() const { return order_; }
  complex operator()(EnergyArg energy) const;
  // Real arithmetic on Re G0; valid for real energies off the base spectrum where G0 is real.
  double real(double energy) const;

 private:
  std::size_t order_ = 0;
  std::vector<double> strengths_;
  std::vector<PairKernel> kernels_;  // upper triangle, row-major
};

}  // namespace deltagreen
