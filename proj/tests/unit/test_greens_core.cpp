#include <doctest.h>

#include <cmath>
#include <functional>

#include "../support/random_systems.hpp"
#include "deltagreen/base_green.hpp"
#include "deltagreen/errors.hpp"
#include "deltagreen/oracle.hpp"

using namespace deltagreen;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("free line kernel closed form") {
  CHECK(free_line_g0(0, 0, -1.0).real() == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(free_line_g0(1, -1, -4.0).real() == doctest::Approx(-std::exp(-4.0) / 4.0).epsilon(1e-14));
  CHECK(free_line_g0(1, -1, -4.0).imag() == 0.0);
  CHECK(free_line_g0(0.3, 2.1, EnergyArg(1.7, 0.2)) == free_line_g0(2.1, 0.3, EnergyArg(1.7, 0.2)));
}

TEST_CASE("free line kernel against the grid oracle") {
  const DecoratedSystem empty{BaseSystem::free_line(), {}};
  const GridHamiltonian grid = discretize(empty, -20.0, 20.0, 8000);
  const std::size_t i = grid.nearest_node(0.0);
  const std::size_t j = grid.nearest_node(1.0);
  const double x = grid.node(i);
  const double xp = grid.node(j);
  CHECK(oracle_green(grid, -1.0, i, j) == doctest::Approx(free_line_g0(x, xp, -1.0).real()).epsilon(1e-4));
}

TEST_CASE("free line continuum needs a shift") {
  CHECK(code_of([] { free_line_g0(0, 1, 0.0); }) == ErrorCode::ContinuumEvaluation);
  CHECK(code_of([] { free_line_g0(0, 1, 2.0); }) == ErrorCode::ContinuumEvaluation);
  const complex g = free_line_g0(0, 0, EnergyArg(1.0, 1e-8));
  // outgoing wave: G0(x,x;k^2) = -i/(2k) in the limit
  CHECK(g.imag() == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(std::abs(g.real()) < 1e-7);
}

TEST_CASE("box kernel") {
  const double L = M_PI;
  CHECK(box_g0(0.0, 1.3, -2.0, L) == complex(0.0));
  CHECK(box_g0(1.3, L, EnergyArg(3.0, 0.1), L) == complex(0.0));
  CHECK(box_g0(0.4, 2.2, 0.5, L) == box_g0(2.2, 0.4, 0.5, L));

  SUBCASE("zero energy limit") {
    CHECK(box_g0(0.4, 2.2, 0.0, L).real() == doctest::Approx(-0.4 * (L - 2.2) / L).epsilon(1e-14));
    CHECK(box_g0(0.4, 2.2, 1e-9, L).real() == doctest::Approx(box_g0(0.4, 2.2, 0.0, L).real()).epsilon(1e-8));
  }

  SUBCASE("agrees with the grid resolvent") {
    const DecoratedSystem empty{BaseSystem::box(L), {}};
    const GridHamiltonian grid = discretize(empty, 0.0, L, 8000);
    const std::size_t i = grid.nearest_node(L / 2);
    const double x = grid.node(i);
    CHECK(oracle_green(grid, 0.5, i, i) == doctest::Approx(box_g0(x, x, 0.5, L).real()).epsilon(1e-4));
  }

  SUBCASE("residue is stable near each level") {
    KernelOptions fine;
    fine.pole_window_rel = 1e-8;
    for (double level : {1.0, 4.0}) {
      const double r4 = (-1e-4) * box_g0(0.7, 1.9, level - 1e-4, L, fine).real();
      const double r6 = (-1e-6) * box_g0(0.7, 1.9, level - 1e-6, L, fine).real();
      CHECK(r4 == doctest::Approx(r6).epsilon(1e-3));
    }
  }

  CHECK(code_of([&] { box_g0(1, 2, 4.0 + 1e-7, L); }) == ErrorCode::PoleWindow);
  CHECK(code_of([&] { box_g0(1, 2, 4.0, L); }) == ErrorCode::PoleWindow);
  CHECK_NOTHROW(box_g0(1, 2, 4.0 + 1e-4, L));
  CHECK_NOTHROW(box_g0(1, 2, EnergyArg(4.0, 1e-3), L));
}

TEST_CASE("box kernel with large imaginary wavenumber does not overflow") {
  const complex g = box_g0(1.0, 1.5, -1e6, 3.0);
  CHECK(std::isfinite(g.real()));
  CHECK(g.real() == doctest::Approx(free_line_g0(1.0, 1.5, -1e6).real()).epsilon(1e-10));
}

TEST_CASE("sign of the box kernel near the ground level") {
  // Below the pole E - 1 < 0 and G0 ~ psi0^2 / (E - 1) is negative.
  CHECK(box_g0(M_PI / 2, M_PI / 2, 1.0 - 1e-3, M_PI).real() < 0.0);
  CHECK(box_g0(M_PI / 2, M_PI / 2, 1.0 + 1e-3, M_PI).real() > 0.0);
}

TEST_CASE("hermite functions") {
  const auto psi = hermite_functions(0.0, 9);
  for (int n = 1; n <= 9; n += 2) CHECK(psi[n] == 0.0);
  CHECK(psi[0] == doctest::Approx(std::pow(M_PI, -0.25)).epsilon(1e-15));

  // orthonormality by trapezoid on a wide grid
  const int nmax = 12;
  std::vector<std::vector<double>> table;
  const double h = 0.01;
  for (double x = -15; x <= 15; x += h) table.push_back(hermite_functions(x, nmax));
  for (int m = 0; m <= nmax; m += 3) {
    for (int n = 0; n <= nmax; n += 4) {
      double sum = 0.0;
      for (const auto& row : table) sum += row[m] * row[n] * h;
      CHECK(sum == doctest::Approx(m == n ? 1.0 : 0.0).epsilon(1e-10));
    }
  }

  // large index stays finite
  for (double v : hermite_functions(30.0, 2000)) CHECK(std::isfinite(v));
}

TEST_CASE("oscillator kernel") {
  SUBCASE("truncation convergence") {
    const double a = ho_g0(0, 0, 0.0, 400).value.real();
    const double b = ho_g0(0, 0, 0.0, 800).value.real();
    CHECK(std::abs(a - b) <= 1e-8);
    const double c = ho_g0(0.5, -1.3, 4.2, 400).value.real();
    const double d = ho_g0(0.5, -1.3, 4.2, 800).value.real();
    CHECK(std::abs(c - d) <= 1e-8);
  }

  SUBCASE("tail estimate bounds the truncation change") {
    for (double e : {-3.0, 0.0, 2.5, 8.0}) {
      const OscillatorValue v = ho_g0(0.3, 1.1, e, 200);
      const OscillatorValue w = ho_g0(0.3, 1.1, e, 1600);
      CHECK(std::abs(v.value - w.value) <= v.tail_estimate);
      CHECK(ho_g0(0.3, 1.1, e, 400).reliable);
    }
    KernelOptions strict;
    strict.ho_tail_tol = 1e-12;
    CHECK_FALSE(ho_g0(0.3, 1.1, 8.0, 200, strict).reliable);
  }

  SUBCASE("agrees with the grid resolvent") {
    const DecoratedSystem empty{BaseSystem::harmonic_oscillator(), {}};
    const GridHamiltonian grid = discretize(empty, -12.0, 12.0, 8000);
    const std::size_t i = grid.nearest_node(0.4);
    const std::size_t j = grid.nearest_node(-0.9);
    const double ref = ho_g0(grid.node(i), grid.node(j), 2.2, 400).value.real();
    CHECK(oracle_green(grid, 2.2, i, j) == doctest::Approx(ref).epsilon(1e-4));
  }

  SUBCASE("ground pole dominates near E = 1") {
    const double x = 0.3;
    const double xp = -0.6;
    const auto psi_x = hermite_functions(x, 0);
    const auto psi_xp = hermite_functions(xp, 0);
    const double d = 1e-6;
    const double g = ho_g0(x, xp, 1.0 - d, 400).value.real();
    CHECK(g * (-d) == doctest::Approx(psi_x[0] * psi_xp[0]).epsilon(1e-5));
  }

  SUBCASE("symmetry") {
    CHECK(ho_g0(0.2, 1.7, EnergyArg(3.3, 0.05), 400).value == ho_g0(1.7, 0.2, EnergyArg(3.3, 0.05), 400).value);
  }

  SUBCASE("mehler kernel matches the eigenfunction sum") {
    const double x = 0.4;
    const double xp = -0.2;
    const double t = 0.3;
    const auto px = hermite_functions(x, 200);
    const auto pxp = hermite_functions(xp, 200);
    double sum = 0.0;
    for (int n = 0; n <= 200; ++n) sum += std::exp(-(2.0 * n + 1.0) * t) * px[n] * pxp[n];
    CHECK(mehler_kernel(x, xp, t) == doctest::Approx(sum).epsilon(1e-13));
  }

  CHECK(code_of([] { ho_g0(0, 0, 1.0, 400); }) == ErrorCode::PoleWindow);
  CHECK_THROWS_AS(BaseSystem::harmonic_oscillator(0), Error);
  KernelOptions narrow;
  narrow.ho_window = 2.0;
  CHECK(code_of([&] { ho_g0(3.0, 0.0, 0.0, 400, narrow); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("base spectrum") {
  const BaseSpectrum free = base_spectrum(BaseSystem::free_line(), -10, -0.01);
  CHECK(free.poles.empty());
  REQUIRE(free.continuum_threshold.has_value());
  CHECK(*free.continuum_threshold == 0.0);

  const BaseSpectrum box = base_spectrum(BaseSystem::box(M_PI), 0, 10);
  REQUIRE(box.poles.size() == 3);
  CHECK(box.poles[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(box.poles[1] == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(box.poles[2] == doctest::Approx(9.0).epsilon(1e-15));
  CHECK_FALSE(box.continuum_threshold.has_value());

  const BaseSpectrum ho = base_spectrum(BaseSystem::harmonic_oscillator(), 0, 6);
  CHECK(ho.poles == std::vector<double>{1, 3, 5});
}

TEST_CASE("pair kernel reproduces the direct evaluation") {
  testsupport::Sampler s(11);
  for (int k = 0; k < 60; ++k) {
    const BaseSystem base = s.base();
    const double x = s.position(base);
    const double xp = s.position(base);
    const PairKernel pk(base, x, xp);
    const EnergyArg e = s.energy(base);
    CHECK(testsupport::rel_diff(pk(e), eval_g0(base, x, xp, e)) <= 1e-13);
  }
}

TEST_CASE("base system validation") {
  CHECK_THROWS_AS(BaseSystem::box(0.0), Error);
  CHECK_THROWS_AS(BaseSystem::box(-1.0), Error);
  CHECK_THROWS_AS(BaseSystem::box(std::nan("")), Error);
  const BaseSystem box = BaseSystem::box(2.0);
  CHECK(box.contains(0.0));
  CHECK_FALSE(box.contains_impurity(0.0));
  CHECK(box.contains_impurity(1e-3));
  CHECK_FALSE(box.contains(2.1));

  const DecoratedSystem outside{box, {{0.5, 1.0}, {2.5, 1.0}}};
  CHECK(code_of([&] { outside.validate(); }) == ErrorCode::ImpurityOutsideDomain);
  const DecoratedSystem nan_strength{BaseSystem::free_line(), {{0.0, std::nan("")}}};
  CHECK(code_of([&] { nan_strength.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("negative shift is rejected") {
  CHECK(code_of([] { free_line_g0(0, 0, EnergyArg(-1.0, -0.1)); }) == ErrorCode::InvalidArgument);
}
