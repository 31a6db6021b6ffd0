// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include "mechtomo/simd/kernels.hpp"

namespace mechtomo::simd::detail {
namespace {

// Two interleaved complex numbers per register: [re0, im0, re1, im1].
inline __m256d load2(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store2(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0xF);
  const __m256d a_swap = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_swap, b_im));
}

inline __m256d cmul_scalar(__m256d a, cplx b) {
  const __m256d a_swap = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, _mm256_set1_pd(b.real()),
                            _mm256_mul_pd(a_swap, _mm256_set1_pd(b.imag())));
}

inline double hsum_even(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return t[0] + t[2];
}
inline double hsum_odd(__m256d v) {
  alignas(32) double t[4];
  _mm256_store_pd(t, v);
  return t[1] + t[3];
}

// acc_re_y = [xr*yr, xi*yr, ...], acc_im_y = [xr*yi, xi*yi, ...]
struct DotAccumulators {
  __m256d re_y = _mm256_setzero_pd();
  __m256d im_y = _mm256_setzero_pd();
  void add(__m256d x, __m256d y) {
    re_y = _mm256_fmadd_pd(x, _mm256_movedup_pd(y), re_y);
    im_y = _mm256_fmadd_pd(x, _mm256_permute_pd(y, 0xF), im_y);
  }
};

cplx dotu(const cplx* x, const cplx* y, std::size_t n) {
  DotAccumulators a0;
  DotAccumulators a1;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    a0.add(load2(x + k), load2(y + k));
    a1.add(load2(x + k + 2), load2(y + k + 2));
  }
  for (; k + 2 <= n; k += 2) a0.add(load2(x + k), load2(y + k));
  const __m256d re_y = _mm256_add_pd(a0.re_y, a1.re_y);
  const __m256d im_y = _mm256_add_pd(a0.im_y, a1.im_y);
  double re = hsum_even(re_y) - hsum_odd(im_y);
  double im = hsum_odd(re_y) + hsum_even(im_y);
  for (; k < n; ++k) {
    re += x[k].real() * y[k].real() - x[k].imag() * y[k].imag();
    im += x[k].real() * y[k].imag() + x[k].imag() * y[k].real();
  }
  return {re, im};
}

cplx dotc(const cplx* x, const cplx* y, std::size_t n) {
  DotAccumulators a0;
  DotAccumulators a1;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    a0.add(load2(x + k), load2(y + k));
    a1.add(load2(x + k + 2), load2(y + k + 2));
  }
  for (; k + 2 <= n; k += 2) a0.add(load2(x + k), load2(y + k));
  const __m256d re_y = _mm256_add_pd(a0.re_y, a1.re_y);
  const __m256d im_y = _mm256_add_pd(a0.im_y, a1.im_y);
  double re = hsum_even(re_y) + hsum_odd(im_y);
  double im = hsum_even(im_y) - hsum_odd(re_y);
  for (; k < n; ++k) {
    re += x[k].real() * y[k].real() + x[k].imag() * y[k].imag();
    im += x[k].real() * y[k].imag() - x[k].imag() * y[k].real();
  }
  return {re, im};
}

void displacement_column(const cplx* prev, const double* root, cplx alpha_conj, double scale,
                         cplx* next, std::size_t n) {
  if (n == 0) return;
  next[0] = -scale * alpha_conj * prev[0];
  const __m256d vscale = _mm256_set1_pd(scale);
  std::size_t m = 1;
  for (; m + 2 <= n; m += 2) {
    const __m128d r = _mm_loadu_pd(root + m);
    const __m256d rr = _mm256_permute4x64_pd(_mm256_castpd128_pd256(r), 0x50);
    const __m256d shifted = _mm256_mul_pd(rr, load2(prev + m - 1));
    const __m256d diag = cmul_scalar(load2(prev + m), alpha_conj);
    store2(next + m, _mm256_mul_pd(vscale, _mm256_sub_pd(shifted, diag)));
  }
  for (; m < n; ++m) {
    next[m] = scale * (root[m] * prev[m - 1] - alpha_conj * prev[m]);
  }
}

void laguerre_step(const double* x, double shift, const cplx* v, double beta, const cplx* w,
                   double scale, cplx* out, std::size_t n) {
  const __m256d vshift = _mm256_set1_pd(shift);
  const __m256d vbeta = _mm256_set1_pd(beta);
  const __m256d vscale = _mm256_set1_pd(scale);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    // [x_k, x_k, x_k+1, x_k+1]
    const __m256d xd = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(x + k)), 0x50);
    const __m256d t = _mm256_sub_pd(xd, vshift);
    const __m256d r = _mm256_fmsub_pd(t, load2(v + k), _mm256_mul_pd(vbeta, load2(w + k)));
    store2(out + k, _mm256_mul_pd(vscale, r));
  }
  for (; k < n; ++k) {
    out[k] = scale * ((x[k] - shift) * v[k] - beta * w[k]);
  }
}

void accumulate_real(cplx coeff, const cplx* x, double* acc, std::size_t n) {
  // Re(c x) = cr*xr - ci*xi
  const __m256d c = _mm256_setr_pd(coeff.real(), -coeff.imag(), coeff.real(), -coeff.imag());
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d t0 = _mm256_mul_pd(c, load2(x + k));
    const __m256d t1 = _mm256_mul_pd(c, load2(x + k + 2));
    // [t0_0+t0_1, t1_0+t1_1, t0_2+t0_3, t1_2+t1_3] -> reorder to k, k+1, k+2, k+3
    const __m256d h = _mm256_permute4x64_pd(_mm256_hadd_pd(t0, t1), 0xD8);
    _mm256_storeu_pd(acc + k, _mm256_add_pd(_mm256_loadu_pd(acc + k), h));
  }
  for (; k < n; ++k) {
    acc[k] += coeff.real() * x[k].real() - coeff.imag() * x[k].imag();
  }
}

constexpr KernelTable table{dotu, dotc, displacement_column, laguerre_step, accumulate_real};

}  // namespace

const KernelTable& avx2_table() { return table; }

}  // namespace mechtomo::simd::detail
