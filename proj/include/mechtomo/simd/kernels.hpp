#pragma once
// Data-parallel inner loops over interleaved complex<double> arrays.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2+FMA variant. The variant is picked once at first use
// from CPUID; MECHTOMO_SIMD=scalar|avx2 in the environment overrides it.
// Variants agree with the reference to rounding (FMA contraction and a
// different summation order are the only differences).

#include <cstddef>
#include <string_view>

#include "mechtomo/types.hpp"

namespace mechtomo::simd {

enum class Isa { scalar, avx2 };

struct KernelTable {
  // sum_k x[k] * y[k]
  cplx (*dotu)(const cplx* x, const cplx* y, std::size_t n);
  // sum_k conj(x[k]) * y[k]
  cplx (*dotc)(const cplx* x, const cplx* y, std::size_t n);
  // next[m] = scale * (root[m] * prev[m-1] - alpha_conj * prev[m]), prev[-1] = 0.
  // One column step of the displacement matrix-element recurrence.
  // next must not alias prev.
  void (*displacement_column)(const cplx* prev, const double* root, cplx alpha_conj,
                              double scale, cplx* next, std::size_t n);
  // out[k] = scale * ((x[k] - shift) * v[k] - beta * w[k]); out may alias w.
  // One step of the normalized Laguerre recurrence used for Fock-basis Wigner functions.
  void (*laguerre_step)(const double* x, double shift, const cplx* v, double beta, const cplx* w,
                        double scale, cplx* out, std::size_t n);
  // acc[k] += Re(coeff * x[k])
  void (*accumulate_real)(cplx coeff, const cplx* x, double* acc, std::size_t n);
};

bool isa_supported(Isa isa);
std::string_view to_string(Isa isa);

// Kernels for the active ISA.
const KernelTable& kernels();
// Kernels for a specific ISA; throws ContractError if it is not available.
const KernelTable& kernels(Isa isa);
Isa active_isa();

namespace detail {
const KernelTable& scalar_table();
#if defined(MECHTOMO_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
}  // namespace detail

}  // namespace mechtomo::simd
