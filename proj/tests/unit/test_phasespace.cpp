#include <gtest/gtest.h>

#include <cmath>

#include "mechtomo/phasespace.hpp"
#include "mechtomo/tomography.hpp"
#include "support.hpp"

namespace mechtomo::phase {
namespace {

constexpr double kTwoOverPi = 2.0 / pi;

CartesianCharFn analytic_vacuum(std::size_t n, double step, double aperture) {
  CartesianCharFn cf;
  cf.n = n;
  cf.step = step;
  cf.aperture = aperture;
  cf.values.resize(n * n);
  for (std::size_t iu = 0; iu < n; ++iu)
    for (std::size_t iv = 0; iv < n; ++iv) cf.values[iu * n + iv] = std::exp(-0.5 * std::norm(cf.mu(iu, iv)));
  return cf;
}

TEST(Axis, Construction) {
  const Axis c = Axis::centered(4, 0.5);
  EXPECT_EQ(c.at(0), -1.0);
  EXPECT_EQ(c.at(2), 0.0);
  EXPECT_EQ(c.max(), 0.5);
  const Axis l = Axis::linspace(-5.0, 5.0, 201);
  EXPECT_NEAR(l.step, 0.05, 1e-15);
  EXPECT_NEAR(l.max(), 5.0, 1e-12);
  EXPECT_CONTRACT(Axis::linspace(1.0, 1.0, 3), ErrorKind::contract);
}

TEST(WignerFock, VacuumAnalytic) {
  const Axis ax = Axis::centered(64, 0.125);
  const WignerGrid w = wigner_fock(fock::make_state(8, fock::Fock{0}).density(), ax, ax);
  double worst = 0.0;
  for (std::size_t i = 0; i < ax.count; ++i)
    for (std::size_t j = 0; j < ax.count; ++j) {
      const double r2 = 0.5 * (ax.at(i) * ax.at(i) + ax.at(j) * ax.at(j));  // |alpha|^2
      worst = std::max(worst, std::abs(w.at(i, j) - kTwoOverPi * std::exp(-2.0 * r2)));
    }
  EXPECT_LE(worst, 1e-14);
  EXPECT_NEAR(w.nearest(0.0, 0.0), kTwoOverPi, 1e-15);
}

TEST(WignerFock, FockOneAndCoherent) {
  const Axis ax = Axis::centered(96, 0.125);
  const WignerGrid f1 = wigner_fock(fock::make_state(8, fock::Fock{1}).density(), ax, ax);
  EXPECT_NEAR(f1.nearest(0.0, 0.0), -kTwoOverPi, 1e-14);
  EXPECT_NEAR(f1.integral(), 1.0, 1e-6);

  // coherent(alpha) peaks at x = sqrt(2) Re alpha, p = sqrt(2) Im alpha
  const cplx alpha(1.0 / std::sqrt(2.0), -0.5 * std::sqrt(2.0));
  const WignerGrid coh = wigner_fock(fock::make_state(32, fock::Coherent{alpha}).density(), ax, ax);
  EXPECT_NEAR(coh.nearest(1.0, -1.0), kTwoOverPi, 1e-9);
}

TEST(WignerFock, LargeAmplitudeStable) {
  const cplx alpha(0.0, 8.0);
  const Axis x = Axis::linspace(-1.0, 1.0, 5);
  const Axis p = Axis::linspace(10.0, 12.6, 14);
  const WignerGrid w = wigner_fock(fock::make_state(160, fock::Coherent{alpha}).density(), x, p);
  for (std::size_t i = 0; i < x.count; ++i)
    for (std::size_t j = 0; j < p.count; ++j) {
      const cplx a(x.at(i) / std::sqrt(2.0), p.at(j) / std::sqrt(2.0));
      EXPECT_NEAR(w.at(i, j), kTwoOverPi * std::exp(-2.0 * std::norm(a - alpha)), 1e-10);
    }
}

TEST(WignerFock, CatIntegralAndNegativity) {
  const Axis ax = Axis::centered(128, 0.125);
  const WignerGrid w = wigner_fock(fock::make_state(64, fock::Cat{1.5, 0.0}).density(), ax, ax);
  EXPECT_NEAR(w.integral(), 1.0, 1e-6);
  EXPECT_LT(w.min_value(), -0.05);
  EXPECT_GT(negativity_volume(w), 0.0);
}

TEST(WignerTransform, VacuumFromAnalyticC) {
  const Axis ax = Axis::centered(64, 0.1875);
  const WignerGrid w = wigner_transform(analytic_vacuum(109, 0.1, 5.4), ax, ax);
  EXPECT_NEAR(w.nearest(0.0, 0.0), kTwoOverPi, 2e-3);
  EXPECT_NEAR(w.integral(), 1.0, 2e-3);
  EXPECT_LT(w.imag_residue, 1e-9);
  EXPECT_TRUE(w.warnings.empty());
}

TEST(WignerTransform, RimWarning) {
  const Axis ax = Axis::centered(16, 0.25);
  const WignerGrid w = wigner_transform(analytic_vacuum(41, 0.1, 2.0), ax, ax);
  ASSERT_EQ(w.warnings.size(), 1u);
  EXPECT_NE(w.warnings[0].find("rim"), std::string::npos);
}

TEST(WignerTransform, AgreesWithFockRoute) {
  const Axis ax = Axis::centered(48, 0.25);
  const fock::QuantumState coh = fock::make_state(64, fock::Coherent{cplx(0.5, 0.3)});
  tomo::TransformSpec spec;
  spec.x = spec.p = ax;
  const WignerGrid direct = tomo::wigner_direct(coh, spec);
  const WignerGrid fockw = wigner_fock(coh.density(), ax, ax);
  EXPECT_LE(max_abs_diff(direct, fockw), 1e-6);
}

TEST(CartesianCharFn, FromPointsValidation) {
  const Axis ax = Axis::centered(4, 0.5);
  std::vector<cplx> mu, c;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      mu.emplace_back(ax.at(i), ax.at(j));
      c.emplace_back(1.0);
    }
  const CartesianCharFn ok = CartesianCharFn::from_points(mu, c, 1.0);
  EXPECT_EQ(ok.n, 4u);
  EXPECT_NEAR(ok.step, 0.5, 1e-15);
  mu[5] += cplx(0.01, 0.0);
  EXPECT_CONTRACT(CartesianCharFn::from_points(mu, c, 1.0), ErrorKind::contract);
  mu.pop_back();
  c.pop_back();
  EXPECT_CONTRACT(CartesianCharFn::from_points(mu, c, 1.0), ErrorKind::contract);
}

TEST(CartesianCharFn, ApertureKeepsMirrors) {
  const CartesianCharFn even = analytic_vacuum(4, 1.0, 10.0);  // nodes -2..1: -2 has no mirror
  EXPECT_FALSE(even.in_aperture(0, 2));
  EXPECT_TRUE(even.in_aperture(1, 3));
  EXPECT_TRUE(even.in_aperture(3, 3));
  const CartesianCharFn odd = analytic_vacuum(5, 1.0, 2.0);  // nodes -2..2 all mirrored
  EXPECT_TRUE(odd.in_aperture(0, 2));
  EXPECT_FALSE(odd.in_aperture(0, 0));  // |mu| = 2 sqrt 2 > 1.5
}

TEST(Diagnostics, SpreadAndNegativity) {
  const Axis ax = Axis::centered(96, 0.125);
  const WignerGrid vac = wigner_fock(fock::make_state(8, fock::Fock{0}).density(), ax, ax);
  EXPECT_NEAR(negativity_volume(vac), 0.0, 0.0);
  EXPECT_NEAR(support_spread(vac, 0.0), 0.25, 1e-6);
  EXPECT_NEAR(support_spread(vac, pi / 2.0), 0.25, 1e-6);
  const WignerGrid f1 = wigner_fock(fock::make_state(8, fock::Fock{1}).density(), ax, ax);
  EXPECT_GT(negativity_volume(f1), 0.05);
}

TEST(Diagnostics, MaxAbsDiffNeedsMatchingAxes) {
  const WignerGrid a = wigner_fock(CMatrix::Identity(1, 1), Axis::centered(4, 0.5), Axis::centered(4, 0.5));
  const WignerGrid b = wigner_fock(CMatrix::Identity(1, 1), Axis::centered(4, 0.25), Axis::centered(4, 0.5));
  EXPECT_EQ(max_abs_diff(a, a), 0.0);
  EXPECT_CONTRACT(max_abs_diff(a, b), ErrorKind::contract);
}

}  // namespace
}  // namespace mechtomo::phase
