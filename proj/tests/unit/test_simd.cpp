#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "mechtomo/simd/kernels.hpp"
#include "support.hpp"

namespace mechtomo {
namespace {

using simd::Isa;

std::vector<cplx> random_cplx(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<cplx> v(n);
  for (auto& x : v) x = cplx(normal(rng), normal(rng));
  return v;
}

std::vector<double> random_real(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 4.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

class SimdEquivalence : public ::testing::TestWithParam<std::size_t> {
 protected:
  void SetUp() override {
    if (!simd::isa_supported(Isa::avx2)) GTEST_SKIP() << "AVX2 not available";
  }
  const simd::KernelTable& ref = simd::kernels(Isa::scalar);
  const simd::KernelTable& vec() { return simd::kernels(Isa::avx2); }
};

TEST_P(SimdEquivalence, Dotu) {
  std::mt19937_64 rng(11);
  const std::size_t n = GetParam();
  const auto x = random_cplx(n, rng), y = random_cplx(n, rng);
  const cplx a = ref.dotu(x.data(), y.data(), n), b = vec().dotu(x.data(), y.data(), n);
  EXPECT_LE(std::abs(a - b), 1e-12 * (1.0 + static_cast<double>(n)));
}

TEST_P(SimdEquivalence, Dotc) {
  std::mt19937_64 rng(12);
  const std::size_t n = GetParam();
  const auto x = random_cplx(n, rng), y = random_cplx(n, rng);
  const cplx a = ref.dotc(x.data(), y.data(), n), b = vec().dotc(x.data(), y.data(), n);
  EXPECT_LE(std::abs(a - b), 1e-12 * (1.0 + static_cast<double>(n)));
}

TEST_P(SimdEquivalence, DisplacementColumn) {
  std::mt19937_64 rng(13);
  const std::size_t n = GetParam();
  const auto prev = random_cplx(n, rng);
  const auto root = random_real(n, rng);
  std::vector<cplx> a(n), b(n);
  ref.displacement_column(prev.data(), root.data(), cplx(0.3, -1.1), 0.7, a.data(), n);
  vec().displacement_column(prev.data(), root.data(), cplx(0.3, -1.1), 0.7, b.data(), n);
  for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(std::abs(a[k] - b[k]), 0.0, 1e-13) << k;
}

TEST_P(SimdEquivalence, LaguerreStep) {
  std::mt19937_64 rng(14);
  const std::size_t n = GetParam();
  const auto x = random_real(n, rng);
  const auto v = random_cplx(n, rng), w = random_cplx(n, rng);
  std::vector<cplx> a(n), b = w;
  ref.laguerre_step(x.data(), 2.5, v.data(), 1.3, w.data(), 0.4, a.data(), n);
  vec().laguerre_step(x.data(), 2.5, v.data(), 1.3, b.data(), 0.4, b.data(), n);  // aliased output
  for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(std::abs(a[k] - b[k]), 0.0, 1e-13) << k;
}

TEST_P(SimdEquivalence, AccumulateReal) {
  std::mt19937_64 rng(15);
  const std::size_t n = GetParam();
  const auto x = random_cplx(n, rng);
  std::vector<double> a(n, 1.0), b(n, 1.0);
  ref.accumulate_real(cplx(0.2, 0.9), x.data(), a.data(), n);
  vec().accumulate_real(cplx(0.2, 0.9), x.data(), b.data(), n);
  for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(a[k], b[k], 1e-14) << k;
}

// Lengths straddling the vector width, including empty and odd tails.
INSTANTIATE_TEST_SUITE_P(Lengths, SimdEquivalence, ::testing::Values(0, 1, 2, 3, 4, 5, 7, 8, 17, 64, 1023));

TEST(SimdScalar, LaguerreStepFormula) {
  const auto& k = simd::kernels(Isa::scalar);
  const double x[2] = {1.0, 3.0};
  const cplx v[2] = {{1.0, 1.0}, {2.0, 0.0}};
  const cplx w[2] = {{0.5, 0.0}, {0.0, -1.0}};
  cplx out[2];
  k.laguerre_step(x, 2.0, v, 3.0, w, 0.5, out, 2);
  // 0.5 * ((1-2)(1+i) - 3*0.5) and 0.5 * ((3-2)*2 - 3*(-i))
  EXPECT_NEAR(std::abs(out[0] - cplx(-1.25, -0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(out[1] - cplx(1.0, 1.5)), 0.0, 1e-15);
}

TEST(SimdDispatch, ScalarAlwaysAvailable) {
  EXPECT_TRUE(simd::isa_supported(Isa::scalar));
  EXPECT_EQ(simd::to_string(Isa::scalar), "scalar");
  if (!simd::isa_supported(Isa::avx2)) {
    EXPECT_CONTRACT(simd::kernels(Isa::avx2), ErrorKind::contract);
  }
}

}  // namespace
}  // namespace mechtomo
