#include "kernels_impl.hpp"

#include <cmath>

namespace deltagreen::kernels::detail {

std::complex<double> resolvent_sum_scalar(const double* weights, const double* poles, std::size_t n,
                                          double e_re, double e_im) {
  if (e_im == 0.0) {
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) acc += weights[k] / (e_re - poles[k]);
    return {acc, 0.0};
  }
  double acc_re = 0.0;
  double acc_im = 0.0;
  const double eta2 = e_im * e_im;
  for (std::size_t k = 0; k < n; ++k) {
    const double d = e_re - poles[k];
    const double den = d * d + eta2;
    acc_re += weights[k] * d / den;
    acc_im -= weights[k] * e_im / den;
  }
  return {acc_re, acc_im};
}

std::int64_t sturm_count_one(const double* diag, const double* offdiag_sq, std::size_t n,
                             double pivmin, double shift) {
  std::int64_t count = 0;
  double q = diag[0] - shift;
  if (std::abs(q) < pivmin) q = -pivmin;
  count += q < 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    q = (diag[i] - shift) - offdiag_sq[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    count += q < 0.0;
  }
  return count;
}

void sturm_count_scalar(const double* diag, const double* offdiag_sq, std::size_t n, double pivmin,
                        const double* shifts, std::int64_t* counts, std::size_t n_shifts) {
  for (std::size_t s = 0; s < n_shifts; ++s)
    counts[s] = sturm_count_one(diag, offdiag_sq, n, pivmin, shifts[s]);
}

}  // namespace deltagreen::kernels::detail
