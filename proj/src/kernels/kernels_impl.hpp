#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

namespace deltagreen::kernels::detail {

std::complex<double> resolvent_sum_scalar(const double* weights, const double* poles, std::size_t n,
                                          double e_re, double e_im);
std::int64_t sturm_count_one(const double* diag, const double* offdiag_sq, std::size_t n,
                             double pivmin, double shift);
void sturm_count_scalar(const double* diag, const double* offdiag_sq, std::size_t n, double pivmin,
                        const double* shifts, std::int64_t* counts, std::size_t n_shifts);

#if defined(DELTAGREEN_HAVE_AVX2)
std::complex<double> resolvent_sum_avx2(const double* weights, const double* poles, std::size_t n,
                                        double e_re, double e_im);
void sturm_count_avx2(const double* diag, const double* offdiag_sq, std::size_t n, double pivmin,
                      const double* shifts, std::int64_t* counts, std::size_t n_shifts);
#endif

}  // namespace deltagreen::kernels::detail
