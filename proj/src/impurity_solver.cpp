#include "deltagreen/impurity_solver.hpp"

#include <algorithm>
#include <cmath>

#include "deltagreen/errors.hpp"
#include "deltagreen/linalg.hpp"

namespace deltagreen {

namespace {

constexpr double kSingularThreshold = 1e-14;

complex g0_tracked(const BaseSystem& base, double x, double xp, EnergyArg e, double& tail) {
  double t = 0.0;
  const complex v = PairKernel(base, x, xp).evaluate(e, &t);
  tail = std::max(tail, t);
  return v;
}

void require_order(const DecoratedSystem& sys, std::size_t n, const char* what) {
  require(sys.size() == n, std::string(what) + " needs exactly " + std::to_string(n) + " impurities");
}

// Probe positions for the printed-form comparison, kept inside the domain.
std::vector<double> probe_points(const DecoratedSystem& sys) {
  const double a = sys.impurities[0].position;
  const double b = sys.impurities[1].position;
  const double spread = std::max(std::abs(b - a), 0.5);
  std::vector<double> raw{a, b, 0.5 * (a + b), std::min(a, b) - 0.5 * spread,
                          std::max(a, b) + 0.5 * spread};
  std::vector<double> pts;
  for (double p : raw) {
    if (const auto* box = std::get_if<Box>(&sys.base.kind())) {
      p = std::clamp(p, 0.05 * box->length, 0.95 * box->length);
    } else if (sys.base.is_oscillator()) {
      const double w = sys.base.options().ho_window;
      p = std::clamp(p, -w, w);
    }
    pts.push_back(p);
  }
  return pts;
}

struct PairSites {
  complex aa, ab, bb;
};

// Derived two-impurity form written so that every term is invariant under x <-> x'.
complex pair_green_from_sites(complex g_xx, complex g_xa, complex g_xb, complex g_pa, complex g_pb,
                              const PairSites& s, double l, double m, complex d) {
  const complex first = l * (g_xa * g_pa) + m * (g_xb * g_pb);
  const complex cross = s.ab * (g_xa * g_pb + g_xb * g_pa) - s.bb * (g_xa * g_pa) - s.aa * (g_xb * g_pb);
  return g_xx + (first + l * m * cross) / d;
}

}  // namespace

ImpurityMatrix build_impurity_matrix(const DecoratedSystem& sys, EnergyArg energy) {
  sys.validate();
  const std::size_t n = sys.size();
  ImpurityMatrix m;
  m.order = n;
  m.energy = energy;
  m.kernel.assign(n * n, 0.0);
  m.entries.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const complex g = g0_tracked(sys.base, sys.impurities[i].position, sys.impurities[j].position,
                                   energy, m.tail_estimate);
      m.kernel[i * n + j] = g;
      m.kernel[j * n + i] = g;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m.entries[i * n + j] = (i == j ? 1.0 : 0.0) - sys.impurities[j].strength * m.kernel[i * n + j];
  return m;
}

complex determinant_d(const DecoratedSystem& sys, EnergyArg energy) {
  if (sys.size() == 0) return 1.0;
  const ImpurityMatrix m = build_impurity_matrix(sys, energy);
  return DenseLu<complex>(m.entries, m.order).determinant();
}

GreenValue decorated_green(const DecoratedSystem& sys, double x, double xp, EnergyArg energy) {
  sys.validate();
  GreenValue out;
  const complex g_xx = g0_tracked(sys.base, x, xp, energy, out.tail_estimate);
  out.value = g_xx;
  const std::size_t n = sys.size();
  if (n == 0) return out;

  const ImpurityMatrix m = build_impurity_matrix(sys, energy);
  out.tail_estimate = std::max(out.tail_estimate, m.tail_estimate);
  const DenseLu<complex> lu(m.entries, n);
  const double scale = hadamard_scale<complex>(m.entries, n);
  if (lu.has_zero_pivot() || !(std::abs(lu.determinant()) > kSingularThreshold * scale))
    fail(ErrorCode::SingularMatrix,
         "impurity matrix is singular at E=" + std::to_string(energy.re) + " (decorated eigenvalue)");

  std::vector<complex> sites(n);
  for (std::size_t i = 0; i < n; ++i)
    sites[i] = g0_tracked(sys.base, sys.impurities[i].position, xp, energy, out.tail_estimate);
  lu.solve(sites);

  complex correction = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const complex g_xa = g0_tracked(sys.base, x, sys.impurities[j].position, energy, out.tail_estimate);
    correction += sys.impurities[j].strength * g_xa * sites[j];
  }
  out.value = g_xx + correction;
  out.condition_estimate =
      std::max(1.0, norm_inf<complex>(m.entries, n) * lu.inverse_norm_inf());
  return out;
}

GreenValue decorated_green_pair_closed(const DecoratedSystem& sys, double x, double xp,
                                       EnergyArg energy) {
  require_order(sys, 2, "decorated_green_pair_closed");
  sys.validate();
  const double a = sys.impurities[0].position;
  const double b = sys.impurities[1].position;
  const double l = sys.impurities[0].strength;
  const double m = sys.impurities[1].strength;

  GreenValue out;
  double& tail = out.tail_estimate;
  const PairSites s{g0_tracked(sys.base, a, a, energy, tail), g0_tracked(sys.base, a, b, energy, tail),
                    g0_tracked(sys.base, b, b, energy, tail)};
  const complex m11 = 1.0 - l * s.aa;
  const complex m22 = 1.0 - m * s.bb;
  const complex m12 = -m * s.ab;
  const complex m21 = -l * s.ab;
  const complex d = m11 * m22 - l * m * (s.ab * s.ab);

  const double scale = std::hypot(std::abs(m11), std::abs(m12)) * std::hypot(std::abs(m21), std::abs(m22));
  if (!(std::abs(d) > kSingularThreshold * scale))
    fail(ErrorCode::DegenerateD, "two-impurity determinant vanishes at E=" + std::to_string(energy.re));

  out.value = pair_green_from_sites(
      g0_tracked(sys.base, x, xp, energy, tail), g0_tracked(sys.base, x, a, energy, tail),
      g0_tracked(sys.base, x, b, energy, tail), g0_tracked(sys.base, xp, a, energy, tail),
      g0_tracked(sys.base, xp, b, energy, tail), s, l, m, d);

  // inverse of a 2x2 is adj / D
  const double norm_m = std::max(std::abs(m11) + std::abs(m12), std::abs(m21) + std::abs(m22));
  const double norm_inv = std::max(std::abs(m22) + std::abs(m12), std::abs(m21) + std::abs(m11)) / std::abs(d);
  out.condition_estimate = std::max(1.0, norm_m * norm_inv);
  return out;
}

complex single_impurity_closed(const BaseSystem& base, const Impurity& imp, double x, double xp,
                               EnergyArg energy) {
  const complex g_xx = eval_g0(base, x, xp, energy);
  const complex g_xa = eval_g0(base, x, imp.position, energy);
  const complex g_ap = eval_g0(base, imp.position, xp, energy);
  const complex g_aa = eval_g0(base, imp.position, imp.position, energy);
  return g_xx + imp.strength * g_xa * g_ap / (1.0 - imp.strength * g_aa);
}

complex pair_determinant_closed(const BaseSystem& base, const Impurity& first, const Impurity& second,
                                EnergyArg energy) {
  const double l = first.strength;
  const double m = second.strength;
  const complex g_aa = eval_g0(base, first.position, first.position, energy);
  const complex g_bb = eval_g0(base, second.position, second.position, energy);
  const complex g_ab = eval_g0(base, first.position, second.position, energy);
  return (1.0 - l * g_aa) * (1.0 - m * g_bb) - l * m * g_ab * g_ab;
}

complex printed_pair_green(const DecoratedSystem& sys, double x, double xp, EnergyArg energy) {
  require_order(sys, 2, "printed_pair_green");
  const BaseSystem& base = sys.base;
  const double a = sys.impurities[0].position;
  const double b = sys.impurities[1].position;
  const double l = sys.impurities[0].strength;
  const double m = sys.impurities[1].strength;
  auto g = [&](double u, double v) { return eval_g0(base, u, v, energy); };
  const complex d = pair_determinant_closed(base, sys.impurities[0], sys.impurities[1], energy);
  // verbatim: note G0(b,b) G0(b,x') in the first bracket and G0(a,a) G0(a,x') in the second
  const complex bracket = g(x, a) * (g(a, b) * g(a, xp) - g(b, b) * g(b, xp)) +
                          g(x, b) * (g(a, b) * g(a, xp) - g(a, a) * g(a, xp));
  return g(x, xp) + (l * g(x, a) * g(a, xp) + m * g(x, b) * g(b, xp) + l * m * bracket) / d;
}

complex printed_triple_determinant(const DecoratedSystem& sys, EnergyArg energy) {
  require_order(sys, 3, "printed_triple_determinant");
  const auto& imp = sys.impurities;
  auto g = [&](std::size_t i, std::size_t j) {
    return eval_g0(sys.base, imp[i].position, imp[j].position, energy);
  };
  complex product = 1.0;
  for (std::size_t j = 0; j < 3; ++j) product *= 1.0 - imp[j].strength * g(j, j);
  complex pairs = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i + 1; j < 3; ++j) pairs += imp[i].strength * imp[j].strength * g(i, j) * g(j, i);
  const complex cycle = imp[0].strength * imp[1].strength * imp[2].strength * g(0, 1) * g(1, 2) * g(2, 0);
  return product - pairs + cycle;
}

PrintedDeviation printed_expansion_diagnostics(const DecoratedSystem& sys, EnergyArg energy) {
  sys.validate();
  PrintedDeviation out;
  if (sys.size() == 2) {
    const auto pts = probe_points(sys);
    double worst = 0.0;
    double scale = 0.0;
    for (double x : pts) {
      for (double xp : pts) {
        const complex derived = decorated_green_pair_closed(sys, x, xp, energy).value;
        const complex printed = printed_pair_green(sys, x, xp, energy);
        worst = std::max(worst, std::abs(printed - derived));
        scale = std::max(scale, std::abs(derived));
      }
    }
    out.pair_green_deviation = scale > 0.0 ? worst / scale : worst;
  }
  if (sys.size() == 3) {
    const ImpurityMatrix m = build_impurity_matrix(sys, energy);
    const complex det = DenseLu<complex>(m.entries, 3).determinant();
    out.triple_determinant_deviation = std::abs(printed_triple_determinant(sys, energy) - det) /
                   hadamard_scale<complex>(m.entries, 3);
  }
  return out;
}

DeterminantEvaluator::DeterminantEvaluator(const DecoratedSystem& sys) : order_(sys.size()) {
  sys.validate();
  strengths_.reserve(order_);
  for (const auto& imp : sys.impurities) strengths_.push_back(imp.strength);
  kernels_.reserve(order_ * (order_ + 1) / 2);
  for (std::size_t i = 0; i < order_; ++i)
    for (std::size_t j = i; j < order_; ++j)
      kernels_.emplace_back(sys.base, sys.impurities[i].position, sys.impurities[j].position);
}

complex DeterminantEvaluator::operator()(EnergyArg energy) const {
  if (order_ == 0) return 1.0;
  std::vector<complex> m(order_ * order_);
  std::size_t k = 0;
  for (std::size_t i = 0; i < order_; ++i) {
    for (std::size_t j = i; j < order_; ++j, ++k) {
      const complex g = kernels_[k](energy);
      m[i * order_ + j] = (i == j ? 1.0 : 0.0) - strengths_[j] * g;
      if (j != i) m[j * order_ + i] = -strengths_[i] * g;
    }
  }
  return DenseLu<complex>(std::move(m), order_).determinant();
}

double DeterminantEvaluator::real(double energy) const {
  if (order_ == 0) return 1.0;
  std::vector<double> m(order_ * order_);
  std::size_t k = 0;
  const EnergyArg e(energy);
  for (std::size_t i = 0; i < order_; ++i) {
    for (std::size_t j = i; j < order_; ++j, ++k) {
      const double g = kernels_[k](e).real();
      m[i * order_ + j] = (i == j ? 1.0 : 0.0) - strengths_[j] * g;
      if (j != i) m[j * order_ + i] = -strengths_[i] * g;
    }
  }
  return DenseLu<double>(std::move(m), order_).determinant();
}

}  // namespace deltagreen
