#include "deltagreen/oracle.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <limits>

#include "deltagreen/errors.hpp"
#include "deltagreen/kernels.hpp"

namespace deltagreen {

namespace {

constexpr double kEigenTol = 1e-11;

struct SturmData {
  std::vector<double> offdiag_sq;
  double pivmin = 0.0;
  double lower = 0.0;  // Gershgorin bounds
  double upper = 0.0;
};

SturmData sturm_data(const GridHamiltonian& g) {
  SturmData s;
  const double e2 = g.offdiag * g.offdiag;
  s.offdiag_sq.assign(g.n > 0 ? g.n - 1 : 0, e2);
  s.pivmin = DBL_MIN * std::max(1.0, e2);
  const double r = std::abs(g.offdiag);
  s.lower = INFINITY;
  s.upper = -INFINITY;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double radius = (i > 0 ? r : 0.0) + (i + 1 < g.n ? r : 0.0);
    s.lower = std::min(s.lower, g.diag[i] - radius);
    s.upper = std::max(s.upper, g.diag[i] + radius);
  }
  const double pad = 2.0 * DBL_EPSILON * std::max(std::abs(s.lower), std::abs(s.upper)) + s.pivmin;
  s.lower -= pad;
  s.upper += pad;
  return s;
}

// Eigenvalue indices [first, last) by bisection, four indices per Sturm sweep.
std::vector<double> bisect_indices(const GridHamiltonian& g, const SturmData& s, std::int64_t first,
                                   std::int64_t last, double lo0, double hi0) {
  std::vector<double> out;
  for (std::int64_t base = first; base < last; base += 4) {
    const std::size_t m = static_cast<std::size_t>(std::min<std::int64_t>(4, last - base));
    std::array<double, 4> lo{}, hi{}, mid{};
    std::array<std::int64_t, 4> cnt{};
    lo.fill(lo0);
    hi.fill(hi0);
    for (int it = 0; it < 200; ++it) {
      bool done = true;
      for (std::size_t q = 0; q < m; ++q) {
        mid[q] = lo[q] + 0.5 * (hi[q] - lo[q]);
        if (hi[q] - lo[q] > kEigenTol && mid[q] > lo[q] && mid[q] < hi[q]) done = false;
      }
      if (done) break;
      kernels::sturm_count(g.diag, s.offdiag_sq, s.pivmin, std::span<const double>(mid.data(), m),
                           std::span<std::int64_t>(cnt.data(), m));
      for (std::size_t q = 0; q < m; ++q) {
        // eigenvalue index base+q is below mid iff more than base+q eigenvalues are below it
        if (cnt[q] > base + static_cast<std::int64_t>(q))
          hi[q] = mid[q];
        else
          lo[q] = mid[q];
      }
    }
    for (std::size_t q = 0; q < m; ++q) out.push_back(lo[q] + 0.5 * (hi[q] - lo[q]));
  }
  return out;
}

// LAPACK dgtsv elimination with partial pivoting, one right-hand side.
// dl, du: sub/super-diagonals (n-1), d: diagonal (n). Returns false on an exactly zero pivot.
bool solve_tridiagonal(std::vector<double> dl, std::vector<double> d, std::vector<double> du,
                       std::vector<double>& b) {
  const std::size_t n = d.size();
  if (n == 0) return true;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) return false;
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
      dl[i] = 0.0;
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (i + 2 < n) {
        dl[i] = du[i + 1];
        du[i + 1] = -fact * dl[i];
      } else {
        dl[i] = 0.0;
      }
      du[i] = temp;
      const double tb = b[i];
      b[i] = b[i + 1];
      b[i + 1] = tb - fact * b[i + 1];
    }
  }
  if (d[n - 1] == 0.0) return false;
  b[n - 1] /= d[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
  for (std::size_t ii = n - 2; ii-- > 0;)
    b[ii] = (b[ii] - du[ii] * b[ii + 1] - dl[ii] * b[ii + 2]) / d[ii];
  return true;
}

}  // namespace

std::size_t GridHamiltonian::nearest_node(double x) const {
  const double t = (x - x_min) / h - 1.0;
  const double idx = std::ceil(t - 0.5);
  if (!(idx >= 0.0 && idx < static_cast<double>(n)))
    fail(ErrorCode::ImpurityOutsideDomain,
         "position " + std::to_string(x) + " has no interior grid node");
  return static_cast<std::size_t>(idx);
}

GridHamiltonian GridHamiltonian::without_impurities() const {
  GridHamiltonian g = *this;
  for (std::size_t k = 0; k < impurity_nodes.size(); ++k) g.diag[impurity_nodes[k]] -= impurity_weights[k];
  g.impurity_nodes.clear();
  g.impurity_weights.clear();
  return g;
}

GridHamiltonian discretize(const DecoratedSystem& sys, double x_min, double x_max, std::size_t n) {
  require(n >= 64, "oracle grid needs n >= 64");
  require(std::isfinite(x_min) && std::isfinite(x_max) && x_min < x_max, "oracle domain is empty");
  if (const auto* box = std::get_if<Box>(&sys.base.kind()))
    require(x_min == 0.0 && x_max == box->length, "box oracle must use exactly [0, L]");

  GridHamiltonian g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.n = n;
  g.h = (x_max - x_min) / static_cast<double>(n + 1);
  g.offdiag = -1.0 / (g.h * g.h);
  g.diag.assign(n, 2.0 / (g.h * g.h));
  if (sys.base.is_oscillator())
    for (std::size_t i = 0; i < n; ++i) g.diag[i] += g.node(i) * g.node(i);

  for (const auto& imp : sys.impurities) {
    require(std::isfinite(imp.position) && std::isfinite(imp.strength), "impurity not finite");
    const std::size_t node = g.nearest_node(imp.position);
    const double w = imp.strength / g.h;
    g.impurity_nodes.push_back(node);
    g.impurity_weights.push_back(w);
    g.diag[node] += w;
  }
  return g;
}

GridHamiltonian discretize(const DecoratedSystem& sys, std::size_t n, double half_width) {
  if (const auto* box = std::get_if<Box>(&sys.base.kind())) return discretize(sys, 0.0, box->length, n);
  if (sys.base.is_oscillator()) {
    const double w = half_width > 0.0 ? half_width : 12.0;
    return discretize(sys, -w, w, n);
  }
  const double w = half_width > 0.0 ? half_width : 20.0;
  double lo = 0.0;
  double hi = 0.0;
  if (!sys.impurities.empty()) {
    lo = hi = sys.impurities.front().position;
    for (const auto& imp : sys.impurities) {
      lo = std::min(lo, imp.position);
      hi = std::max(hi, imp.position);
    }
  }
  return discretize(sys, lo - w, hi + w, n);
}

std::int64_t eigen_count_below(const GridHamiltonian& grid, double e) {
  const SturmData s = sturm_data(grid);
  std::int64_t c = 0;
  kernels::sturm_count(grid.diag, s.offdiag_sq, s.pivmin, std::span<const double>(&e, 1),
                       std::span<std::int64_t>(&c, 1));
  return c;
}

std::vector<double> oracle_eigenvalues(const GridHamiltonian& grid, std::size_t k) {
  require(k <= grid.n, "cannot request more eigenvalues than grid points");
  const SturmData s = sturm_data(grid);
  return bisect_indices(grid, s, 0, static_cast<std::int64_t>(k), s.lower, s.upper);
}

std::vector<double> oracle_eigenvalues_in(const GridHamiltonian& grid, double e_lo, double e_hi) {
  require(e_lo < e_hi, "oracle window needs e_lo < e_hi");
  const SturmData s = sturm_data(grid);
  const std::int64_t first = eigen_count_below(grid, e_lo);
  const std::int64_t last = eigen_count_below(grid, e_hi);
  return bisect_indices(grid, s, first, last, std::max(s.lower, e_lo), std::min(s.upper, e_hi));
}

std::vector<double> oracle_green_column(const GridHamiltonian& grid, double e, std::size_t j,
                                        std::optional<double> margin) {
  require(j < grid.n, "oracle node index out of range");
  const double m = margin.value_or(1e-8 * std::max(1.0, std::abs(e)));
  if (eigen_count_below(grid, e + m) != eigen_count_below(grid, e - m))
    fail(ErrorCode::NearEigenvalue, "oracle resolvent requested within " + std::to_string(m) +
                                        " of a grid eigenvalue");
  std::vector<double> d(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) d[i] = e - grid.diag[i];
  std::vector<double> off(grid.n - 1, -grid.offdiag);
  std::vector<double> b(grid.n, 0.0);
  b[j] = 1.0 / grid.h;
  if (!solve_tridiagonal(off, std::move(d), off, b))
    fail(ErrorCode::NearEigenvalue, "oracle resolvent hit an exactly singular pivot");
  return b;
}

double oracle_green(const GridHamiltonian& grid, double e, std::size_t i, std::size_t j,
                    std::optional<double> margin) {
  require(i < grid.n, "oracle node index out of range");
  return oracle_green_column(grid, e, j, margin)[i];
}

double dyson_residual(const GridHamiltonian& grid, double e, std::size_t j) {
  const GridHamiltonian base = grid.without_impurities();
  const auto dec = oracle_green_column(grid, e, j);
  const auto g0_j = oracle_green_column(base, e, j);
  std::vector<std::vector<double>> g0_sites;
  for (std::size_t node : grid.impurity_nodes) g0_sites.push_back(oracle_green_column(base, e, node));

  double worst = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    double r = dec[i] - g0_j[i];
    for (std::size_t k = 0; k < grid.impurity_nodes.size(); ++k) {
      // g0(i, m) = g0(m, i) on the symmetric grid
      r -= grid.h * grid.impurity_weights[k] * g0_sites[k][i] * dec[grid.impurity_nodes[k]];
    }
    worst = std::max(worst, std::abs(r));
    scale = std::max(scale, std::abs(dec[i]));
  }
  return scale > 0.0 ? worst / scale : worst;
}

double oracle_tolerance(double e) { return std::max(5e-3 * std::abs(e), 5e-3); }

bool OracleReport::all_matched() const {
  return std::all_of(pairs.begin(), pairs.end(), [](const OraclePair& p) {
    return p.root && p.eigenvalue && p.deviation <= oracle_tolerance(*p.root);
  });
}

double OracleReport::max_deviation() const {
  double worst = 0.0;
  for (const auto& p : pairs) worst = std::max(worst, p.deviation);
  return worst;
}

OracleReport compare_with_oracle(const std::vector<double>& roots, const GridHamiltonian& grid,
                                 double e_lo, double e_hi) {
  OracleReport rep;
  rep.x_min = grid.x_min;
  rep.x_max = grid.x_max;
  rep.n = grid.n;
  rep.h = grid.h;

  std::vector<double> sorted_roots = roots;
  std::sort(sorted_roots.begin(), sorted_roots.end());
  rep.eigenvalues = oracle_eigenvalues_in(grid, e_lo - oracle_tolerance(e_lo), e_hi + oracle_tolerance(e_hi));

  const double inf = std::numeric_limits<double>::infinity();
  auto near_edge = [&](double ev) {
    return ev < e_lo + oracle_tolerance(e_lo) || ev > e_hi - oracle_tolerance(e_hi);
  };
  std::size_t i = 0;
  std::size_t j = 0;
  const auto& ev = rep.eigenvalues;
  while (i < sorted_roots.size() || j < ev.size()) {
    if (i < sorted_roots.size() && j < ev.size()) {
      const double r = sorted_roots[i];
      const double dev = std::abs(r - ev[j]);
      if (dev <= oracle_tolerance(r)) {
        rep.pairs.push_back({r, ev[j], dev});
        ++i;
        ++j;
      } else if (r < ev[j]) {
        rep.pairs.push_back({r, std::nullopt, inf});
        ++i;
      } else {
        if (!near_edge(ev[j])) rep.pairs.push_back({std::nullopt, ev[j], inf});
        ++j;
      }
    } else if (i < sorted_roots.size()) {
      rep.pairs.push_back({sorted_roots[i++], std::nullopt, inf});
    } else {
      if (!near_edge(ev[j])) rep.pairs.push_back({std::nullopt, ev[j], inf});
      ++j;
    }
  }
  return rep;
}

}  // namespace deltagreen
