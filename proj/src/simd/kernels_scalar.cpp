#include "mechtomo/simd/kernels.hpp"

namespace mechtomo::simd::detail {
namespace {

cplx dotu(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    re += x[k].real() * y[k].real() - x[k].imag() * y[k].imag();
    im += x[k].real() * y[k].imag() + x[k].imag() * y[k].real();
  }
  return {re, im};
}

cplx dotc(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    re += x[k].real() * y[k].real() + x[k].imag() * y[k].imag();
    im += x[k].real() * y[k].imag() - x[k].imag() * y[k].real();
  }
  return {re, im};
}

void displacement_column(const cplx* prev, const double* root, cplx alpha_conj, double scale,
                         cplx* next, std::size_t n) {
  if (n == 0) return;
  next[0] = -scale * alpha_conj * prev[0];
  for (std::size_t m = 1; m < n; ++m) {
    next[m] = scale * (root[m] * prev[m - 1] - alpha_conj * prev[m]);
  }
}

void laguerre_step(const double* x, double shift, const cplx* v, double beta, const cplx* w,
                   double scale, cplx* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = scale * ((x[k] - shift) * v[k] - beta * w[k]);
  }
}

void accumulate_real(cplx coeff, const cplx* x, double* acc, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    acc[k] += coeff.real() * x[k].real() - coeff.imag() * x[k].imag();
  }
}

constexpr KernelTable table{dotu, dotc, displacement_column, laguerre_step, accumulate_real};

}  // namespace

const KernelTable& scalar_table() { return table; }

}  // namespace mechtomo::simd::detail
