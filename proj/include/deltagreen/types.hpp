#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace deltagreen {

// Units: hbar = 2m = 1, so H0 = -d^2/dx^2 + V0(x) and G0 = (E - H0)^{-1}.
// Impurities add to the Hamiltonian: H = H0 + sum_j strength_j * delta(x - position_j).

using complex = std::complex<double>;

// Energy argument of a retarded Green function. im is the eta shift and must be >= 0.
struct EnergyArg {
  double re = 0.0;
  double im = 0.0;

  EnergyArg() = default;
  EnergyArg(double re_, double im_ = 0.0) : re(re_), im(im_) {}  // NOLINT: implicit from real

  complex value() const { return {re, im}; }
  bool is_real() const { return im == 0.0; }
};

// Evaluation knobs shared by every base kernel.
struct KernelOptions {
  double pole_window_rel = 1e-6;   // half-width of the pole exclusion window, relative to |E_n|
  double pole_window_abs = 1e-9;   // absolute floor of that half-width
  double ho_window = 12.0;         // |x| bound for oscillator evaluations
  double ho_tail_tol = 1e-8;       // tail estimates above this flag the value unreliable
  double ho_reference_energy = -1.0;
  int ho_subtractions = 4;

  double pole_half_width(double pole) const;
};

struct FreeLine {};

struct Box {
  double length = 1.0;
};

struct HarmonicOscillator {
  int nmax = 400;
};

using BaseKind = std::variant<FreeLine, Box, HarmonicOscillator>;

class BaseSystem {
 public:
  BaseSystem() = default;
  explicit BaseSystem(BaseKind kind, KernelOptions options = {});

  static BaseSystem free_line(KernelOptions options = {});
  static BaseSystem box(double length, KernelOptions options = {});
  static BaseSystem harmonic_oscillator(int nmax = 400, KernelOptions options = {});

  const BaseKind& kind() const { return kind_; }
  const KernelOptions& options() const { return options_; }
  KernelOptions& options() { return options_; }

  bool is_free_line() const { return std::holds_alternative<FreeLine>(kind_); }
  bool is_box() const { return std::holds_alternative<Box>(kind_); }
  bool is_oscillator() const { return std::holds_alternative<HarmonicOscillator>(kind_); }

  // Closed domain for kernel arguments. Impurities in a box must be strictly inside.
  bool contains(double x) const;
  bool contains_impurity(double x) const;

  std::string name() const;

 private:
  BaseKind kind_ = FreeLine{};
  KernelOptions options_;
};

struct Impurity {
  double position = 0.0;
  double strength = 0.0;
};

// A base system plus delta impurities. Positions may coincide; list order is the matrix index order.
struct DecoratedSystem {
  BaseSystem base;
  std::vector<Impurity> impurities;

  std::size_t size() const { return impurities.size(); }

  // Throws InvalidArgument / ImpurityOutsideDomain when an impurity violates the domain.
  void validate() const;
};

}  // namespace deltagreen
