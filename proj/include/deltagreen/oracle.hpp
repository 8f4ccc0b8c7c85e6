#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "deltagreen/types.hpp"

namespace deltagreen {

// Second-order finite differences for H0 + sum_j s_j delta(x - a_j) on n interior nodes
// x_i = x_min + (i + 1) h, h = (x_max - x_min) / (n + 1), Dirichlet ends. Each delta puts
// weight s_j / h on its nearest node (ties go to the lower index).
struct GridHamiltonian {
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t n = 0;
  double h = 0.0;
  std::vector<double> diag;             // 2/h^2 + V0(x_i) + impurity weights
  double offdiag = 0.0;                 // -1/h^2
  std::vector<std::size_t> impurity_nodes;
  std::vector<double> impurity_weights;  // s_j / h, parallel to impurity_nodes

  double node(std::size_t i) const { return x_min + static_cast<double>(i + 1) * h; }
  std::size_t nearest_node(double x) const;  // throws ImpurityOutsideDomain
  GridHamiltonian without_impurities() const;
};

GridHamiltonian discretize(const DecoratedSystem& sys, double x_min, double x_max, std::size_t n);

// Box: exactly [0, L]. Oscillator: [-W, W] (default W = 12). Free line: [min a - W, max a + W]
// (default W = 20).
GridHamiltonian discretize(const DecoratedSystem& sys, std::size_t n, double half_width = 0.0);

// Number of grid eigenvalues strictly below e.
std::int64_t eigen_count_below(const GridHamiltonian& grid, double e);

// k lowest eigenvalues by Sturm-sequence bisection, 4 shifts per sweep.
std::vector<double> oracle_eigenvalues(const GridHamiltonian& grid, std::size_t k);
std::vector<double> oracle_eigenvalues_in(const GridHamiltonian& grid, double e_lo, double e_hi);

// Resolvent kernel on the grid: g = (E - H)^{-1} e_j / h, returns g_i. NearEigenvalue when an
// eigenvalue lies within margin of e (default margin 1e-8 max(1, |e|)).
double oracle_green(const GridHamiltonian& grid, double e, std::size_t i, std::size_t j,
                    std::optional<double> margin = std::nullopt);
std::vector<double> oracle_green_column(const GridHamiltonian& grid, double e, std::size_t j,
                                        std::optional<double> margin = std::nullopt);

// max_i |g(i,j) - g0(i,j) - sum_m h V_m g0(i,m) g(m,j)| / max_i |g(i,j)|, where g0 belongs to
// the grid with the impurities removed and V_m are the impurity weights.
double dyson_residual(const GridHamiltonian& grid, double e, std::size_t j);

struct OraclePair {
  std::optional<double> root;
  std::optional<double> eigenvalue;
  double deviation = 0.0;  // |root - eigenvalue|, infinity when unmatched
};

struct OracleReport {
  std::vector<double> eigenvalues;  // oracle eigenvalues considered, ascending
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t n = 0;
  double h = 0.0;
  std::vector<OraclePair> pairs;

  // Every pair matched within tolerance(E) = max(rel * |E|, abs).
  bool all_matched() const;
  double max_deviation() const;
};

double oracle_tolerance(double e);  // max(5e-3 |e|, 5e-3)

// One-to-one matching of roots against the oracle eigenvalues in [e_lo, e_hi]. Unmatched
// eigenvalues within tolerance of the window edges are dropped.
OracleReport compare_with_oracle(const std::vector<double>& roots, const GridHamiltonian& grid,
                                 double e_lo, double e_hi);

}  // namespace deltagreen
