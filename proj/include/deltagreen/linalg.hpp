#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace deltagreen {

// Row-major dense LU with partial pivoting. Small N only (impurity counts).
template <class T>
class DenseLu {
 public:
  DenseLu(std::vector<T> a, std::size_t n) : lu_(std::move(a)), n_(n), perm_(n) {
    for (std::size_t i = 0; i < n_; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t piv = k;
      double best = std::abs(at(k, k));
      for (std::size_t i = k + 1; i < n_; ++i) {
        const double v = std::abs(at(i, k));
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (piv != k) {
        for (std::size_t j = 0; j < n_; ++j) std::swap(at(k, j), at(piv, j));
        std::swap(perm_[k], perm_[piv]);
        odd_ = !odd_;
      }
      const T pivot = at(k, k);
      if (pivot == T(0)) {
        zero_pivot_ = true;
        continue;
      }
      for (std::size_t i = k + 1; i < n_; ++i) {
        const T factor = at(i, k) / pivot;
        at(i, k) = factor;
        if (factor == T(0)) continue;
        for (std::size_t j = k + 1; j < n_; ++j) at(i, j) -= factor * at(k, j);
      }
    }
  }

  std::size_t size() const { return n_; }
  bool has_zero_pivot() const { return zero_pivot_; }

  T determinant() const {
    T det = odd_ ? T(-1) : T(1);
    for (std::size_t k = 0; k < n_; ++k) det *= at(k, k);
    return det;
  }

  // Solves A x = b in place.
  void solve(std::span<T> b) const {
    std::vector<T> y(n_);
    for (std::size_t i = 0; i < n_; ++i) y[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < i; ++j) y[i] -= at(i, j) * y[j];
    for (std::size_t ii = n_; ii-- > 0;) {
      for (std::size_t j = ii + 1; j < n_; ++j) y[ii] -= at(ii, j) * y[j];
      y[ii] /= at(ii, ii);
    }
    std::copy(y.begin(), y.end(), b.begin());
  }

  // ||A^{-1}||_inf from n solves.
  double inverse_norm_inf() const {
    std::vector<double> row_sums(n_, 0.0);
    std::vector<T> col(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      std::fill(col.begin(), col.end(), T(0));
      col[j] = T(1);
      solve(col);
      for (std::size_t i = 0; i < n_; ++i) row_sums[i] += std::abs(col[i]);
    }
    return n_ ? *std::max_element(row_sums.begin(), row_sums.end()) : 0.0;
  }

 private:
  T& at(std::size_t i, std::size_t j) { return lu_[i * n_ + j]; }
  const T& at(std::size_t i, std::size_t j) const { return lu_[i * n_ + j]; }

  std::vector<T> lu_;
  std::size_t n_;
  std::vector<std::size_t> perm_;
  bool odd_ = false;
  bool zero_pivot_ = false;
};

template <class T>
double norm_inf(std::span<const T> a, std::size_t n) {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::abs(a[i * n + j]);
    best = std::max(best, s);
  }
  return best;
}

// Hadamard bound prod_i ||row_i||_2 >= |det A|.
template <class T>
double hadamard_scale(std::span<const T> a, std::size_t n) {
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::norm(a[i * n + j]);
    scale *= std::sqrt(s);
  }
  return scale;
}

}  // namespace deltagreen
