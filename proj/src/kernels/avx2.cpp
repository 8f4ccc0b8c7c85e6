// Compiled with -mavx2 only; the dispatcher never calls in here unless CPUID reports AVX2.
// No FMA: the Sturm recurrence must round exactly like the scalar reference.

#include "kernels_impl.hpp"

#include <immintrin.h>

namespace deltagreen::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

std::complex<double> resolvent_sum_avx2(const double* weights, const double* poles, std::size_t n,
                                        double e_re, double e_im) {
  const std::size_t body = n - n % 4;
  const __m256d er = _mm256_set1_pd(e_re);
  std::size_t k = 0;
  if (e_im == 0.0) {
    __m256d acc = _mm256_setzero_pd();
    for (; k < body; k += 4) {
      const __m256d d = _mm256_sub_pd(er, _mm256_loadu_pd(poles + k));
      acc = _mm256_add_pd(acc, _mm256_div_pd(_mm256_loadu_pd(weights + k), d));
    }
    double total = hsum(acc);
    for (; k < n; ++k) total += weights[k] / (e_re - poles[k]);
    return {total, 0.0};
  }

  const __m256d ei = _mm256_set1_pd(e_im);
  const __m256d eta2 = _mm256_set1_pd(e_im * e_im);
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  for (; k < body; k += 4) {
    const __m256d w = _mm256_loadu_pd(weights + k);
    const __m256d d = _mm256_sub_pd(er, _mm256_loadu_pd(poles + k));
    const __m256d den = _mm256_add_pd(_mm256_mul_pd(d, d), eta2);
    acc_re = _mm256_add_pd(acc_re, _mm256_div_pd(_mm256_mul_pd(w, d), den));
    acc_im = _mm256_sub_pd(acc_im, _mm256_div_pd(_mm256_mul_pd(w, ei), den));
  }
  double total_re = hsum(acc_re);
  double total_im = hsum(acc_im);
  const double eta2_s = e_im * e_im;
  for (; k < n; ++k) {
    const double d = e_re - poles[k];
    const double den = d * d + eta2_s;
    total_re += weights[k] * d / den;
    total_im -= weights[k] * e_im / den;
  }
  return {total_re, total_im};
}

void sturm_count_avx2(const double* diag, const double* offdiag_sq, std::size_t n, double pivmin,
                      const double* shifts, std::int64_t* counts, std::size_t n_shifts) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d vpivmin = _mm256_set1_pd(pivmin);
  const __m256d neg_pivmin = _mm256_set1_pd(-pivmin);
  const __m256d zero = _mm256_setzero_pd();

  std::size_t s = 0;
  for (; s + 4 <= n_shifts; s += 4) {
    const __m256d shift = _mm256_loadu_pd(shifts + s);
    __m256i count = _mm256_setzero_si256();

    __m256d q = _mm256_sub_pd(_mm256_set1_pd(diag[0]), shift);
    __m256d tiny = _mm256_cmp_pd(_mm256_andnot_pd(sign_mask, q), vpivmin, _CMP_LT_OQ);
    q = _mm256_blendv_pd(q, neg_pivmin, tiny);
    count = _mm256_sub_epi64(count, _mm256_castpd_si256(_mm256_cmp_pd(q, zero, _CMP_LT_OQ)));

    for (std::size_t i = 1; i < n; ++i) {
      const __m256d t = _mm256_div_pd(_mm256_set1_pd(offdiag_sq[i - 1]), q);
      q = _mm256_sub_pd(_mm256_sub_pd(_mm256_set1_pd(diag[i]), shift), t);
      tiny = _mm256_cmp_pd(_mm256_andnot_pd(sign_mask, q), vpivmin, _CMP_LT_OQ);
      q = _mm256_blendv_pd(q, neg_pivmin, tiny);
      count = _mm256_sub_epi64(count, _mm256_castpd_si256(_mm256_cmp_pd(q, zero, _CMP_LT_OQ)));
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(counts + s), count);
  }
  for (; s < n_shifts; ++s) counts[s] = sturm_count_one(diag, offdiag_sq, n, pivmin, shifts[s]);
}

}  // namespace deltagreen::kernels::detail
