#include <gtest/gtest.h>

#include <cmath>

#include "mechtomo/device.hpp"
#include "support.hpp"

namespace mechtomo::device {
namespace {

constexpr double kTwoPi = 2.0 * pi;

TEST(MagneticGradient, Examples) {
  EXPECT_DOUBLE_EQ(magnetic_gradient(1e-15, 1e-6) / magnetic_gradient(1e-15, 2e-6), 16.0);
  EXPECT_EQ(magnetic_gradient(0.0, 1e-6), 0.0);
  // 3 mu0 mu_c / (4 pi r^4), evaluated at 30 digits
  EXPECT_NEAR(magnetic_gradient(1e-15, 1e-6), 300.000000163312716, 1e-9);
  EXPECT_CONTRACT(magnetic_gradient(1e-15, 0.0), ErrorKind::invalid_geometry);
}

TEST(CouplingGac, Examples) {
  DeviceParams p = reference_device();
  // mu_B g_F m_Fx G_B sqrt(hbar / (2 omega_c m_c)) / hbar, evaluated at 30 digits
  EXPECT_NEAR(coupling_g_ac(p), 7469.39047514481713, 1e-9);
  EXPECT_NEAR(zero_point_amplitude(p), 6.06688447027362590e-14, 1e-27);
  const double g = coupling_g_ac(p);
  p.m_c *= 4.0;
  EXPECT_NEAR(coupling_g_ac(p), 0.5 * g, 1e-12 * g);
  p.m_Fx = 0.0;
  EXPECT_EQ(coupling_g_ac(p), 0.0);
}

TEST(CouplingGac, LinearInPrefactors) {
  const DeviceParams base = reference_device();
  const double g = coupling_g_ac(base);
  DeviceParams p = base;
  p.g_F *= -3.0;
  EXPECT_NEAR(coupling_g_ac(p), -3.0 * g, 1e-12 * std::abs(g));
  p = base;
  p.m_Fx *= 2.5;
  EXPECT_NEAR(coupling_g_ac(p), 2.5 * g, 1e-12 * std::abs(g));
  p = base;
  p.mu_c *= 0.1;
  EXPECT_NEAR(coupling_g_ac(p), 0.1 * g, 1e-12 * std::abs(g));
  p = base;
  p.r *= 2.0;
  EXPECT_NEAR(coupling_g_ac(p), g / 16.0, 1e-12 * std::abs(g));
}

TEST(CouplingGac, Validation) {
  DeviceParams p = reference_device();
  p.omega_c = 0.0;
  EXPECT_CONTRACT(coupling_g_ac(p), ErrorKind::invalid_geometry);
}

TEST(CouplingGac, FiniteAcrossRanges) {
  DeviceParams p = reference_device();
  for (double scale : {1e-30, 1e-10, 1.0, 1e10}) {
    p.mu_c = scale;
    p.m_c = scale;
    EXPECT_TRUE(std::isfinite(coupling_g_ac(p))) << scale;
  }
}

TEST(RamanCoupling, Examples) {
  RamanParams rp{0.0, kTwoPi * 1e6, kTwoPi * 1e9};
  EXPECT_EQ(raman_coupling(rp), 0.0);
  rp.omega_L_rabi = kTwoPi * 1e6;
  EXPECT_NEAR(raman_coupling(rp), -kTwoPi * 1e3, 1e-9);
  const double g = raman_coupling(rp);
  rp.delta_L *= 2.0;
  EXPECT_NEAR(raman_coupling(rp), 0.5 * g, 1e-12);
  rp.delta_L = 0.0;
  EXPECT_CONTRACT(raman_coupling(rp), ErrorKind::division_by_zero);
}

TEST(RamanCoupling, DetuningWarning) {
  RamanParams rp = reference_raman();
  EXPECT_FALSE(rp.detuning_warning(reference_device().omega_0));
  rp.delta_L = kTwoPi * 1e9;
  EXPECT_TRUE(rp.detuning_warning(reference_device().omega_0));
}

TEST(MatchCouplings, BackSubstitution) {
  const DeviceParams p = reference_device();
  const RamanParams rp = reference_raman();
  const double g = coupling_g_ac(p);

  RamanParams m = rp;
  m.delta_L = match_couplings(p, rp, FreeParameter::delta_L);
  EXPECT_NEAR(m.delta_L, -26426799974.9952983, 1e-3);
  EXPECT_NEAR(raman_coupling(m), g, 1e-12 * g);

  m = rp;
  m.delta_L = -rp.delta_L;  // flips the Raman sign; Omega_L must stay positive
  EXPECT_CONTRACT(match_couplings(p, m, FreeParameter::omega_L), ErrorKind::unmatchable);
  m.omega_L_rabi = match_couplings(p, rp, FreeParameter::omega_L);
  m.delta_L = rp.delta_L;
  EXPECT_NEAR(raman_coupling(m), g, 1e-12 * g);

  DeviceParams moved = p;
  moved.r = match_couplings(p, rp, FreeParameter::distance);
  EXPECT_NEAR(coupling_g_ac(moved), raman_coupling(rp), 1e-12 * std::abs(raman_coupling(rp)));
}

TEST(MatchCouplings, FixedPoint) {
  const DeviceParams p = reference_device();
  RamanParams rp = reference_raman();
  rp.delta_L = match_couplings(p, rp, FreeParameter::delta_L);
  EXPECT_NEAR(match_couplings(p, rp, FreeParameter::delta_L), rp.delta_L, 1e-12 * std::abs(rp.delta_L));
  EXPECT_NEAR(match_couplings(p, rp, FreeParameter::omega_L), rp.omega_L_rabi, 1e-12 * rp.omega_L_rabi);
  EXPECT_NEAR(match_couplings(p, rp, FreeParameter::distance), p.r, 1e-12 * p.r);
}

TEST(MatchCouplings, MagnitudeOnly) {
  const DeviceParams p = reference_device();
  RamanParams rp = reference_raman();
  rp.delta_L = -rp.delta_L;  // Raman coupling now has the opposite sign of g_ac
  EXPECT_CONTRACT(match_couplings(p, rp, FreeParameter::distance), ErrorKind::unmatchable);
  DeviceParams moved = p;
  moved.r = match_couplings(p, rp, FreeParameter::distance, MatchSign::magnitude_only);
  EXPECT_NEAR(std::abs(coupling_g_ac(moved)), std::abs(raman_coupling(rp)), 1e-12 * std::abs(raman_coupling(rp)));
}

TEST(ResonanceReport, Examples) {
  DeviceParams p = reference_device();
  ResonanceReport r = resonance_report(p);
  EXPECT_EQ(r.detuning, 0.0);
  EXPECT_TRUE(r.resonant);

  p.omega_c = kTwoPi * 228e6;
  p.omega_0 = kTwoPi * 228.1e6;
  r = resonance_report(p);
  EXPECT_NEAR(std::abs(r.detuning), kTwoPi * 1e5, 1e-6);
  EXPECT_TRUE(r.resonant);  // 2 pi 1e5 < 1e-3 omega_c = 2 pi 2.28e5

  p.omega_c = 1000.0;
  p.omega_0 = 999.0;
  r = resonance_report(p);
  EXPECT_EQ(std::abs(r.detuning), r.threshold);
  EXPECT_FALSE(r.resonant);  // the boundary itself is off-resonant
}

}  // namespace
}  // namespace mechtomo::device
