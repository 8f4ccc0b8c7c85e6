#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference implementation and,
// on x86-64, an AVX2 variant. The variant is chosen once at runtime from CPUID and
// can be pinned for testing with set_isa().

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>

namespace deltagreen::kernels {

enum class Isa { Auto, Scalar, Avx2 };

// sum_n weights[n] / (E - poles[n]) with E = e_re + i*e_im.
using ResolventSumFn = std::complex<double> (*)(const double* weights, const double* poles,
                                                std::size_t n, double e_re, double e_im);

// For each shift s_k: number of negative pivots of the LDL^T factorisation of T - s_k I,
// i.e. the count of eigenvalues of the symmetric tridiagonal T strictly below s_k.
// diag has n entries, offdiag_sq has n-1 entries (squared off-diagonals).
using SturmCountFn = void (*)(const double* diag, const double* offdiag_sq, std::size_t n,
                              double pivmin, const double* shifts, std::int64_t* counts,
                              std::size_t n_shifts);

struct KernelTable {
  Isa isa;
  const char* name;
  ResolventSumFn resolvent_sum;
  SturmCountFn sturm_count;
};

const KernelTable& scalar_table();
// nullptr when the build or the CPU lacks AVX2.
const KernelTable* avx2_table();

bool cpu_has_avx2();

// Active table: the pinned one if set_isa() selected a variant, else the best available.
const KernelTable& active();

// Returns false (and changes nothing) when the requested variant is unavailable.
bool set_isa(Isa isa);
Isa current_isa();

// Convenience wrappers through the active table.
std::complex<double> resolvent_sum(std::span<const double> weights, std::span<const double> poles,
                                   std::complex<double> energy);

void sturm_count(std::span<const double> diag, std::span<const double> offdiag_sq, double pivmin,
                 std::span<const double> shifts, std::span<std::int64_t> counts);

}  // namespace deltagreen::kernels
