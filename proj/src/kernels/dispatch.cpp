#include "deltagreen/kernels.hpp"

#include <atomic>
#include <cassert>

#include "kernels_impl.hpp"

namespace deltagreen::kernels {

namespace {

const KernelTable kScalar{Isa::Scalar, "scalar", &detail::resolvent_sum_scalar,
                          &detail::sturm_count_scalar};

#if defined(DELTAGREEN_HAVE_AVX2)
const KernelTable kAvx2{Isa::Avx2, "avx2", &detail::resolvent_sum_avx2, &detail::sturm_count_avx2};
#endif

std::atomic<Isa> g_pinned{Isa::Auto};

const KernelTable& best_available() {
  static const KernelTable* best = [] {
    const KernelTable* t = avx2_table();
    return t ? t : &kScalar;
  }();
  return *best;
}

}  // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  static const bool has = __builtin_cpu_supports("avx2");
  return has;
#else
  return false;
#endif
}

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(DELTAGREEN_HAVE_AVX2)
  return cpu_has_avx2() ? &kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  switch (g_pinned.load(std::memory_order_relaxed)) {
    case Isa::Scalar:
      return kScalar;
    case Isa::Avx2:
      return *avx2_table();  // set_isa() only pins Avx2 when available
    case Isa::Auto:
      break;
  }
  return best_available();
}

bool set_isa(Isa isa) {
  if (isa == Isa::Avx2 && avx2_table() == nullptr) return false;
  g_pinned.store(isa, std::memory_order_relaxed);
  return true;
}

Isa current_isa() { return active().isa; }

std::complex<double> resolvent_sum(std::span<const double> weights, std::span<const double> poles,
                                   std::complex<double> energy) {
  assert(weights.size() == poles.size());
  return active().resolvent_sum(weights.data(), poles.data(), weights.size(), energy.real(),
                                energy.imag());
}

void sturm_count(std::span<const double> diag, std::span<const double> offdiag_sq, double pivmin,
                 std::span<const double> shifts, std::span<std::int64_t> counts) {
  assert(!diag.empty() && offdiag_sq.size() + 1 == diag.size());
  assert(shifts.size() == counts.size());
  active().sturm_count(diag.data(), offdiag_sq.data(), diag.size(), pivmin, shifts.data(),
                       counts.data(), shifts.size());
}

}  // namespace deltagreen::kernels
