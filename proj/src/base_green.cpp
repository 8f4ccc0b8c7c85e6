#include "deltagreen/base_green.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "deltagreen/errors.hpp"
#include "deltagreen/kernels.hpp"

namespace deltagreen {

namespace {

constexpr double kPi = std::numbers::pi;

// Squared Cramer bound on normalised Hermite functions: |psi_n(x)| <= 1.086435 pi^{-1/4}.
constexpr double kHermiteEnvelope = 1.086435 * 1.086435 / 1.7724538509055160273;

complex neg_energy_root(EnergyArg energy) {
  // principal sqrt(-E); for real E > 0 this is -i sqrt(E), the retarded limit
  return std::sqrt(complex(-energy.re, -energy.im));
}

// 1 - exp(-2 z) without cancellation for small |z|.
complex one_minus_exp_neg2(complex z) {
  if (std::abs(z) > 0.25) return 1.0 - std::exp(-2.0 * z);
  const complex w = -2.0 * z;
  complex term = w;
  complex sum = w;
  for (int k = 2; k < 40; ++k) {
    term *= w / static_cast<double>(k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return -sum;
}

struct GaussRule {
  std::array<double, 16> nodes{};
  std::array<double, 16> weights{};
};

const GaussRule& gauss_legendre16() {
  static const GaussRule rule = [] {
    GaussRule r;
    constexpr int n = 16;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      r.nodes[i] = x;
      r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

// Breakpoints for integrals over s in [0, upper] of functions with features at any small scale.
std::vector<double> graded_breakpoints(double upper) {
  std::vector<double> b;
  b.push_back(0.0);
  for (int j = 50; j >= 4; --j) b.push_back(std::ldexp(upper, -j));
  const int uniform = 15;
  const double start = std::ldexp(upper, -3);
  for (int i = 0; i <= uniform; ++i) b.push_back(start + (upper - start) * i / uniform);
  return b;
}

void require_oscillator_point(double x, const KernelOptions& options) {
  require(std::isfinite(x) && std::abs(x) <= options.ho_window,
          "oscillator argument outside the evaluation window");
}

std::vector<double> oscillator_poles(int nmax) {
  std::vector<double> p(static_cast<std::size_t>(nmax) + 1);
  for (int n = 0; n <= nmax; ++n) p[n] = 2.0 * n + 1.0;
  return p;
}

void check_oscillator_poles(EnergyArg energy, int nmax, const KernelOptions& options) {
  const int centre = static_cast<int>(std::lround((energy.re - 1.0) / 2.0));
  std::array<double, 3> near{};
  std::size_t count = 0;
  for (int n = centre - 1; n <= centre + 1; ++n)
    if (n >= 0 && n <= nmax) near[count++] = 2.0 * n + 1.0;
  detail::check_pole_window(energy, std::span<const double>(near.data(), count), options);
}

}  // namespace

namespace detail {

void check_pole_window(EnergyArg energy, std::span<const double> poles, const KernelOptions& options) {
  for (double p : poles) {
    if (std::abs(energy.value() - p) < options.pole_half_width(p))
      fail(ErrorCode::PoleWindow,
           "energy " + std::to_string(energy.re) + " lies in the exclusion window of pole " +
               std::to_string(p));
  }
}

std::vector<double> mehler_moments(double x, double xp, double reference_energy, int count) {
  std::vector<double> moments(static_cast<std::size_t>(std::max(count, 0)), 0.0);
  if (count <= 0) return moments;
  require(reference_energy < 1.0, "reference energy must lie below the ground level");

  // t = s^2 removes the t^{-1/2} singularity; the integrand decays like exp((E_r - 1) s^2).
  const double upper = std::sqrt(90.0 / (1.0 - reference_energy));
  const auto breaks = graded_breakpoints(upper);
  const GaussRule& rule = gauss_legendre16();
  const double sum2 = (x + xp) * (x + xp) / 4.0;
  const double diff2 = (x - xp) * (x - xp) / 4.0;

  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    const double a = breaks[p];
    const double b = breaks[p + 1];
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double s = mid + half * rule.nodes[q];
      const double t = s * s;
      const double th = std::tanh(t);
      double f = 2.0 * s / std::sqrt(2.0 * kPi * std::sinh(2.0 * t)) *
                 std::exp(reference_energy * t - sum2 * th - diff2 / th);
      f *= half * rule.weights[q];
      for (int k = 0; k < count; ++k) {
        moments[k] += f;
        f *= t;
      }
    }
  }
  // R_k = (-1)^k / (k-1)! * int t^{k-1} e^{E_r t} K dt
  double factorial = 1.0;
  for (int k = 1; k <= count; ++k) {
    if (k > 1) factorial *= (k - 1);
    moments[k - 1] *= ((k % 2) ? -1.0 : 1.0) / factorial;
  }
  return moments;
}

double oscillator_tail_estimate(complex energy, double reference_energy, int subtractions, int nmax,
                                bool* formed) {
  *formed = false;
  if (nmax < 1) return 0.0;
  const double lever = std::abs(reference_energy - energy);
  if (subtractions > 0 && lever == 0.0) {
    *formed = true;
    return 0.0;
  }
  auto envelope = [&](int n) {
    const double en = 2.0 * n + 1.0;
    return kHermiteEnvelope * std::pow(lever / std::abs(reference_energy - en), subtractions) /
           std::abs(energy - en);
  };
  const double last = envelope(nmax);
  const double ratio = last / envelope(nmax - 1);
  if (!std::isfinite(ratio) || ratio >= 1.0) return 0.0;
  *formed = true;
  return last / (1.0 - ratio);
}

}  // namespace detail

complex free_line_g0(double x, double xp, EnergyArg energy) {
  require(std::isfinite(x) && std::isfinite(xp), "free-line arguments must be finite");
  require(energy.im >= 0.0, "energy imaginary part must be >= 0");
  if (energy.im == 0.0 && energy.re >= 0.0)
    fail(ErrorCode::ContinuumEvaluation,
         "free-line kernel at real E >= 0 needs an eta > 0 shift");
  const complex kappa = neg_energy_root(energy);
  const double dist = std::max(x, xp) - std::min(x, xp);
  return -std::exp(-kappa * dist) / (2.0 * kappa);
}

complex box_g0(double x, double xp, EnergyArg energy, double length, const KernelOptions& options) {
  require(length > 0.0, "box length must be positive");
  require(energy.im >= 0.0, "energy imaginary part must be >= 0");
  require(x >= 0.0 && x <= length && xp >= 0.0 && xp <= length, "box arguments outside [0, L]");

  const double k1 = kPi / length;
  const double n0 = std::floor(std::sqrt(std::max(energy.re, 0.0)) / k1);
  std::array<double, 2> near{};
  std::size_t count = 0;
  for (double n = std::max(n0, 1.0); n <= n0 + 1.0; n += 1.0) near[count++] = (n * k1) * (n * k1);
  detail::check_pole_window(energy, std::span<const double>(near.data(), count), options);

  const double lo = std::min(x, xp);
  const double hi = std::max(x, xp);
  if (energy.re == 0.0 && energy.im == 0.0) return -lo * (length - hi) / length;

  // -sinh(kappa lo) sinh(kappa (L - hi)) / (kappa sinh(kappa L)) with each sinh factored as
  // e^{z} (1 - e^{-2z}) / 2, so only decaying exponentials remain.
  const complex kappa = neg_energy_root(energy);
  const complex num = one_minus_exp_neg2(kappa * lo) * one_minus_exp_neg2(kappa * (length - hi));
  const complex den = 2.0 * kappa * one_minus_exp_neg2(kappa * length);
  return -num / den * std::exp(-kappa * (hi - lo));
}

std::vector<double> hermite_functions(double x, int nmax) {
  require(nmax >= 0, "nmax must be >= 0");
  std::vector<double> psi(static_cast<std::size_t>(nmax) + 1);
  psi[0] = std::exp(-0.5 * x * x) / std::sqrt(std::sqrt(kPi));
  if (nmax >= 1) psi[1] = std::sqrt(2.0) * x * psi[0];
  for (int n = 1; n < nmax; ++n) {
    psi[n + 1] = std::sqrt(2.0 / (n + 1)) * x * psi[n] - std::sqrt(static_cast<double>(n) / (n + 1)) * psi[n - 1];
  }
  return psi;
}

double mehler_kernel(double x, double xp, double t) {
  require(t > 0.0, "heat-kernel time must be positive");
  const double th = std::tanh(t);
  return std::exp(-(x + xp) * (x + xp) * th / 4.0 - (x - xp) * (x - xp) / (4.0 * th)) /
         std::sqrt(2.0 * kPi * std::sinh(2.0 * t));
}

OscillatorValue ho_g0(double x, double xp, EnergyArg energy, int nmax, const KernelOptions& options) {
  require(nmax >= 1, "oscillator nmax must be >= 1");
  BaseSystem base = BaseSystem::harmonic_oscillator(nmax, options);
  PairKernel kernel(base, x, xp);
  OscillatorValue out;
  out.value = kernel.evaluate(energy, &out.tail_estimate);
  out.reliable = out.tail_estimate <= options.ho_tail_tol;
  return out;
}

BaseSpectrum base_spectrum(const BaseSystem& base, double e_lo, double e_hi) {
  require(e_lo < e_hi, "base_spectrum needs e_lo < e_hi");
  BaseSpectrum out;
  if (base.is_free_line()) {
    out.continuum_threshold = 0.0;
  } else if (const auto* box = std::get_if<Box>(&base.kind())) {
    const double k1 = kPi / box->length;
    for (int n = 1;; ++n) {
      const double e = (n * k1) * (n * k1);
      if (e > e_hi) break;
      if (e >= e_lo) out.poles.push_back(e);
    }
  } else if (const auto* ho = std::get_if<HarmonicOscillator>(&base.kind())) {
    for (int n = 0; n <= ho->nmax; ++n) {
      const double e = 2.0 * n + 1.0;
      if (e > e_hi) break;
      if (e >= e_lo) out.poles.push_back(e);
    }
  }
  return out;
}

complex eval_g0(const BaseSystem& base, double x, double xp, EnergyArg energy) {
  if (base.is_free_line()) return free_line_g0(x, xp, energy);
  if (const auto* box = std::get_if<Box>(&base.kind()))
    return box_g0(x, xp, energy, box->length, base.options());
  const auto& ho = std::get<HarmonicOscillator>(base.kind());
  return ho_g0(x, xp, energy, ho.nmax, base.options()).value;
}

PairKernel::PairKernel(const BaseSystem& base, double x, double xp)
    : base_(base), x_lo_(std::min(x, xp)), x_hi_(std::max(x, xp)) {
  require(base.contains(x) && base.contains(xp), "kernel argument outside the base domain");
  if (const auto* ho = std::get_if<HarmonicOscillator>(&base.kind())) {
    const KernelOptions& opt = base.options();
    require_oscillator_point(x, opt);
    require_oscillator_point(xp, opt);
    const auto psi_lo = hermite_functions(x_lo_, ho->nmax);
    const auto psi_hi = hermite_functions(x_hi_, ho->nmax);
    poles_ = oscillator_poles(ho->nmax);
    weights_.resize(poles_.size());
    for (std::size_t n = 0; n < poles_.size(); ++n) {
      weights_[n] = psi_lo[n] * psi_hi[n] /
                    std::pow(opt.ho_reference_energy - poles_[n], opt.ho_subtractions);
    }
    moments_ = detail::mehler_moments(x_lo_, x_hi_, opt.ho_reference_energy, opt.ho_subtractions);
  }
}

complex PairKernel::evaluate(EnergyArg energy, double* tail_estimate) const {
  if (tail_estimate) *tail_estimate = 0.0;
  if (base_.is_free_line()) return free_line_g0(x_lo_, x_hi_, energy);
  if (const auto* box = std::get_if<Box>(&base_.kind()))
    return box_g0(x_lo_, x_hi_, energy, box->length, base_.options());

  const auto& ho = std::get<HarmonicOscillator>(base_.kind());
  const KernelOptions& opt = base_.options();
  require(energy.im >= 0.0, "energy imaginary part must be >= 0");
  check_oscillator_poles(energy, ho.nmax, opt);

  const complex e = energy.value();
  bool formed = false;
  const double tail =
      detail::oscillator_tail_estimate(e, opt.ho_reference_energy, opt.ho_subtractions, ho.nmax, &formed);
  if (!formed)
    fail(ErrorCode::TailEstimate, "oscillator tail estimate cannot be formed at E=" +
                                      std::to_string(energy.re) + " with nmax=" +
                                      std::to_string(ho.nmax));
  if (tail_estimate) *tail_estimate = tail;

  const complex lever = opt.ho_reference_energy - e;
  complex value = 0.0;
  complex power = 1.0;
  for (double moment : moments_) {
    value += power * moment;
    power *= lever;
  }
  value += power * kernels::resolvent_sum(weights_, poles_, e);
  return value;
}

}  // namespace deltagreen
