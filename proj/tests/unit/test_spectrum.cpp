#include <doctest.h>

#include <cmath>
#include <vector>

#include "deltagreen/errors.hpp"
#include "deltagreen/oracle.hpp"
#include "deltagreen/spectrum.hpp"

using namespace deltagreen;

namespace {

double fixed_point(double sign, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f = mid - 1.0 - sign * std::exp(-2.0 * mid);
    const double flo = lo - 1.0 - sign * std::exp(-2.0 * lo);
    ((f < 0) == (flo < 0) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("scan brackets the single bound state") {
  const DecoratedSystem sys{BaseSystem::free_line(), {{0.0, -2.0}}};
  const DeterminantProfile p = scan_determinant(sys, -4.0, -0.05);
  REQUIRE(p.brackets.size() == 1);
  CHECK(p.brackets[0].contains(-1.0));
  CHECK(p.energies.size() == p.values.size());
  CHECK(p.marginal.empty());
}

TEST_CASE("no impurities give no brackets") {
  const DeterminantProfile p = scan_determinant({BaseSystem::box(2.0), {}}, -3.0, 20.0);
  CHECK(p.brackets.empty());
  for (double v : p.values) CHECK(v == 1.0);
}

TEST_CASE("box scan matches the oracle count") {
  const DecoratedSystem sys{BaseSystem::box(M_PI), {{1.0, -1.0}}};
  const DeterminantProfile p = scan_determinant(sys, -2.0, 9.0);
  CHECK(p.exclusions.size() >= 2);  // poles at 1 and 4 (9 sits on the boundary)
  const GridHamiltonian grid = discretize(sys, 4000);
  CHECK(static_cast<std::int64_t>(p.brackets.size()) == eigen_count_below(grid, 9.0) - eigen_count_below(grid, -2.0));
  for (const auto& b : p.brackets)
    for (const auto& x : p.exclusions) CHECK((b.hi <= x.lo || b.lo >= x.hi));
}

TEST_CASE("range fully excluded") {
  const DecoratedSystem sys{BaseSystem::box(M_PI), {{1.0, -1.0}}};
  try {
    scan_determinant(sys, 1.0 - 1e-7, 1.0 + 1e-7);
    FAIL("expected EmptyRange");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyRange);
  }
  CHECK_THROWS_AS(scan_determinant(sys, 2.0, 1.0), Error);
  SpectrumOptions tiny;
  tiny.samples = 1;
  CHECK_THROWS_AS(scan_determinant(sys, -1.0, 0.5, tiny), Error);
}

TEST_CASE("single impurity root") {
  const SpectrumReport r = find_spectrum({BaseSystem::free_line(), {{0.0, -2.0}}}, -10.0, 0.0);
  REQUIRE(r.roots.size() == 1);
  CHECK(std::abs(r.roots[0].energy + 1.0) <= 1e-9);
  CHECK(r.roots[0].bracket_width <= 1e-10);
  CHECK_FALSE(r.roots[0].marginal);
}

TEST_CASE("repulsive impurity has no bound state") {
  CHECK(find_spectrum({BaseSystem::free_line(), {{0.0, 2.0}}}, -10.0, 0.0).roots.empty());
}

TEST_CASE("two impurity roots") {
  const SpectrumReport r = find_spectrum({BaseSystem::free_line(), {{0.0, -2.0}, {2.0, -2.0}}}, -10.0, 0.0);
  const auto e = r.energies(false);
  REQUIRE(e.size() == 2);
  const double kp = fixed_point(1.0, 1.0, 2.0);
  const double km = fixed_point(-1.0, 0.5, 1.0);
  CHECK(std::abs(e[0] + kp * kp) <= 1e-8);
  CHECK(std::abs(e[1] + km * km) <= 1e-8);
}

TEST_CASE("antisymmetric state at threshold") {
  const SpectrumReport r = find_spectrum({BaseSystem::free_line(), {{0.0, -2.0}, {1.0, -2.0}}}, -10.0, 0.0);
  CHECK(r.energies(false).size() == 1);
}

TEST_CASE("nearly degenerate pair is resolved") {
  const SpectrumReport r = find_spectrum({BaseSystem::free_line(), {{0.0, -2.0}, {20.0, -2.0}}}, -10.0, 0.0);
  const auto e = r.energies(false);
  REQUIRE(e.size() == 2);
  CHECK(std::abs(e[0] + 1.0) <= 1e-8);
  CHECK(std::abs(e[1] + 1.0) <= 1e-8);
  CHECK(e[0] < e[1]);
}

TEST_CASE("double zero is reported as marginal") {
  // coincident impurities with opposite strengths: D = 1 identically, no roots
  CHECK(find_spectrum({BaseSystem::free_line(), {{0.0, -1.0}, {0.0, 1.0}}}, -5.0, 0.0).roots.empty());

  // a tangency in a smooth profile: box with a strong repulsive impurity at the centre pushes
  // the odd level onto the even one; just check marginal roots are flagged, not refined
  const DecoratedSystem sys{BaseSystem::box(M_PI), {{M_PI / 2, 200.0}}};
  const SpectrumReport r = find_spectrum(sys, 0.5, 6.0);
  for (const auto& root : r.roots)
    if (root.marginal) CHECK(root.abs_d <= 1e-8);
}

TEST_CASE("oscillator spectrum against the oracle") {
  const DecoratedSystem sys{BaseSystem::harmonic_oscillator(), {{0.5, -1.0}}};
  const SpectrumReport r = find_spectrum(sys, -2.0, 6.0);
  const OracleReport cmp = compare_with_oracle(r.energies(false), discretize(sys, 4000), -2.0, 6.0);
  CHECK(cmp.all_matched());
  CHECK(cmp.max_deviation() <= 5e-3);
}

TEST_CASE("coalescence sweep") {
  const std::vector<double> offsets = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 0.0};
  const CoalescenceTable t = coalescence_sweep(BaseSystem::free_line(), 0.0, -1.0, -1.0, offsets, -5.0, 0.0);
  CHECK(t.combined_root == doctest::Approx(-1.0).epsilon(1e-10));
  REQUIRE(t.rows.size() == offsets.size());
  for (std::size_t k = 1; k < t.rows.size(); ++k)
    CHECK(std::abs(t.rows[k].lowest_root + 1.0) < std::abs(t.rows[k - 1].lowest_root + 1.0) + 1e-12);
  CHECK(std::abs(t.rows.back().lowest_root + 1.0) <= 1e-12);

  const CoalescenceTable lone = coalescence_sweep(BaseSystem::free_line(), 0.0, -2.0, 0.0, offsets, -5.0, 0.0);
  for (const auto& row : lone.rows) CHECK(std::abs(row.lowest_root + 1.0) <= 1e-9);

  const std::vector<double> ascending = {1e-3, 1e-2};
  CHECK_THROWS_AS(coalescence_sweep(BaseSystem::free_line(), 0.0, -1, -1, ascending, -5.0, 0.0), Error);
  const std::vector<double> negative = {-1e-3};
  CHECK_THROWS_AS(coalescence_sweep(BaseSystem::free_line(), 0.0, -1, -1, negative, -5.0, 0.0), Error);
}

TEST_CASE("coalescence in a box") {
  const std::vector<double> offsets = {1e-2, 1e-4, 0.0};
  const CoalescenceTable t = coalescence_sweep(BaseSystem::box(3.0), 1.2, -1.5, -0.5, offsets, -6.0, 1.0);
  REQUIRE(t.rows.size() == 3);
  CHECK(std::abs(t.rows.back().lowest_root - t.combined_root) <= 1e-9);
}

TEST_CASE("decoupling sweep") {
  const std::vector<double> seps = {20.0};
  const DecouplingTable t = decoupling_sweep(-2.0, -2.0, seps, -10.0, 0.0);
  REQUIRE(t.rows.size() == 1);
  REQUIRE(t.rows[0].roots.size() == 2);
  for (double r : t.rows[0].roots) CHECK(std::abs(r + 1.0) <= 1e-8);

  const std::vector<double> far = {30.0};
  const DecouplingTable u = decoupling_sweep(-2.0, -4.0, far, -10.0, 0.0);
  REQUIRE(u.rows[0].roots.size() == 2);
  CHECK(std::abs(u.rows[0].roots[0] + 4.0) <= 1e-8);
  CHECK(std::abs(u.rows[0].roots[1] + 1.0) <= 1e-8);

  const std::vector<double> sweep = {1.5, 2.5, 4.0, 6.0, 9.0};
  const DecouplingTable v = decoupling_sweep(-2.0, -3.0, sweep, -10.0, 0.0);
  for (std::size_t k = 1; k < v.rows.size(); ++k) CHECK(v.rows[k].deviation <= v.rows[k - 1].deviation);

  const std::vector<double> unsorted = {3.0, 2.0};
  CHECK_THROWS_AS(decoupling_sweep(-1, -1, unsorted, -5.0, 0.0), Error);
}

TEST_CASE("thread count does not change the result") {
  const DecoratedSystem sys{BaseSystem::box(4.0), {{0.7, -3.0}, {1.9, 2.0}, {3.1, -1.0}}};
  SpectrumOptions opts;
  opts.threads = 1;
  const SpectrumReport ref = find_spectrum(sys, -10.0, 30.0, opts);
  for (unsigned t : {2u, 4u, 7u}) {
    opts.threads = t;
    const SpectrumReport other = find_spectrum(sys, -10.0, 30.0, opts);
    REQUIRE(other.roots.size() == ref.roots.size());
    for (std::size_t k = 0; k < ref.roots.size(); ++k) CHECK(other.roots[k].energy == ref.roots[k].energy);
  }
}
