#include "mechtomo/device.hpp"

#include <cmath>
#include <numbers>

#include "mechtomo/error.hpp"

namespace mechtomo::device {
namespace {

constexpr const char* kModule = "device";

[[noreturn]] void fail(ErrorKind kind, const std::string& message) {
  throw ContractError(kind, kModule, message);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void DeviceParams::validate() const {
  if (!positive(m_c)) fail(ErrorKind::invalid_geometry, "m_c must be > 0");
  if (!positive(omega_c)) fail(ErrorKind::invalid_geometry, "omega_c must be > 0");
  if (!positive(omega_0)) fail(ErrorKind::invalid_geometry, "omega_0 must be > 0");
  if (!positive(r)) fail(ErrorKind::invalid_geometry, "r must be > 0");
  if (!std::isfinite(mu_c) || !std::isfinite(g_F) || !std::isfinite(m_Fx)) {
    fail(ErrorKind::invalid_geometry, "device parameters must be finite");
  }
}

void RamanParams::validate() const {
  if (!std::isfinite(omega_L_rabi) || !std::isfinite(omega_k_rabi) || !std::isfinite(delta_L)) {
    fail(ErrorKind::contract, "Raman parameters must be finite");
  }
  if (delta_L == 0.0) fail(ErrorKind::division_by_zero, "Raman detuning delta_L is zero");
}

bool RamanParams::detuning_warning(double omega_0) const { return std::abs(delta_L) < 10.0 * omega_0; }

DeviceParams reference_device() {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  DeviceParams p;
  p.omega_0 = two_pi * 228e6;
  p.omega_c = p.omega_0;
  p.m_c = 1e-17;
  p.mu_c = 1.4e-15;  // ~ (100 nm)^3 cobalt domain
  p.r = 100e-9;
  p.g_F = 2.0 / 3.0;
  p.m_Fx = 0.5;
  return p;
}

RamanParams reference_raman() {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  RamanParams rp;
  rp.omega_L_rabi = two_pi * 5e6;
  rp.omega_k_rabi = two_pi * 1e6;
  rp.delta_L = -two_pi * 4e9;
  return rp;
}

double magnetic_gradient(double mu_c, double r) {
  if (!positive(r)) fail(ErrorKind::invalid_geometry, "distance r must be > 0");
  const double r2 = r * r;
  return 3.0 * kVacuumPermeability * std::abs(mu_c) / (4.0 * std::numbers::pi * r2 * r2);
}

double zero_point_amplitude(const DeviceParams& p) {
  p.validate();
  return std::sqrt(kHbar / (2.0 * p.omega_c * p.m_c));
}

double coupling_g_ac(const DeviceParams& p) {
  p.validate();
  const double gradient = magnetic_gradient(p.mu_c, p.r);
  return kBohrMagneton * p.g_F * p.m_Fx * gradient * zero_point_amplitude(p) / kHbar;
}

double raman_coupling(const RamanParams& rp) {
  rp.validate();
  return -rp.omega_L_rabi * rp.omega_k_rabi / rp.delta_L;
}

double match_couplings(const DeviceParams& p, const RamanParams& rp, FreeParameter free, MatchSign sign) {
  p.validate();
  const bool magnitude = sign == MatchSign::magnitude_only;
  switch (free) {
    case FreeParameter::omega_L: {
      rp.validate();
      const double g_ac = coupling_g_ac(p);
      if (rp.omega_k_rabi == 0.0) fail(ErrorKind::unmatchable, "Omega_k is zero");
      double omega_L = -g_ac * rp.delta_L / rp.omega_k_rabi;
      if (magnitude) omega_L = std::abs(omega_L);
      if (!positive(omega_L)) fail(ErrorKind::unmatchable, "no positive Omega_L reproduces g_ac");
      return omega_L;
    }
    case FreeParameter::delta_L: {
      const double g_ac = coupling_g_ac(p);
      const double product = rp.omega_L_rabi * rp.omega_k_rabi;
      if (g_ac == 0.0 || product == 0.0) fail(ErrorKind::unmatchable, "zero coupling cannot be matched by delta_L");
      double delta = -product / g_ac;
      if (magnitude) delta = std::copysign(std::abs(delta), rp.delta_L == 0.0 ? delta : rp.delta_L);
      if (!std::isfinite(delta)) fail(ErrorKind::unmatchable, "delta_L solution is not finite");
      return delta;
    }
    case FreeParameter::distance: {
      const double target = raman_coupling(rp);
      // g_ac(r) = k / r^4
      const double r2 = p.r * p.r;
      const double k = coupling_g_ac(p) * r2 * r2;
      double ratio = k / target;
      if (magnitude) ratio = std::abs(ratio);
      if (!positive(ratio)) fail(ErrorKind::unmatchable, "no positive distance reproduces the Raman coupling");
      return std::sqrt(std::sqrt(ratio));
    }
  }
  fail(ErrorKind::contract, "unknown free parameter");
}

ResonanceReport resonance_report(const DeviceParams& p) {
  ResonanceReport report;
  report.detuning = p.omega_c - p.omega_0;
  report.threshold = 1e-3 * p.omega_c;
  report.resonant = std::abs(report.detuning) < report.threshold;
  report.note = report.resonant
                    ? "resonant: rotating-wave Jaynes-Cummings coupling applies"
                    : "off-resonant: |omega_c - omega_0| >= 1e-3 omega_c, rotating-wave treatment not valid";
  return report;
}

}  // namespace mechtomo::device
