#pragma once
// Physical coupling calculator: magnet geometry, atom and Raman drive -> rates.
// Inputs are SI; every returned rate is in rad/s.

#include <string>
#include <vector>

namespace mechtomo::device {

// CODATA 2018
inline constexpr double kBohrMagneton = 9.2740100783e-24;    // J/T
inline constexpr double kVacuumPermeability = 1.25663706212e-6;  // N/A^2
inline constexpr double kHbar = 1.054571817e-34;               // J s

struct DeviceParams {
  double m_c = 0.0;      // effective oscillator mass, kg
  double omega_c = 0.0;  // oscillator angular frequency, rad/s
  double omega_0 = 0.0;  // atomic two-level splitting, rad/s
  double mu_c = 0.0;     // magnet dipole moment, J/T
  double r = 0.0;        // atom-magnet distance, m
  double g_F = 0.0;      // Lande factor
  double m_Fx = 0.0;     // projection quantum number along the motion axis

  // Throws invalid_geometry unless m_c, omega_c, omega_0, r are strictly positive and all fields finite.
  void validate() const;
};

struct RamanParams {
  double omega_L_rabi = 0.0;  // classical-field Rabi frequency, rad/s
  double omega_k_rabi = 0.0;  // vacuum Rabi frequency of the quantized field, rad/s
  double delta_L = 0.0;       // Raman detuning, rad/s

  // Throws division_by_zero for delta_L == 0.
  void validate() const;
  // True when |delta_L| < 10 omega_0, i.e. the far-detuned elimination is questionable.
  bool detuning_warning(double omega_0) const;
};

// Illustrative 6Li parameter set: omega_0 = 2 pi x 228 MHz hyperfine splitting at
// resonance with the oscillator; mass, magnet and distance are plausible
// nanoresonator values chosen to put g in the kHz range. Not measured data.
DeviceParams reference_device();
RamanParams reference_raman();

// |G_B| = 3 mu0 |mu_c| / (4 pi r^4), T/m.
double magnetic_gradient(double mu_c, double r);
// Zero-point amplitude sqrt(hbar / (2 omega_c m_c)), m.
double zero_point_amplitude(const DeviceParams& p);
// Magnetic Jaynes-Cummings coupling mu_B g_F m_Fx G_B x_zpf / hbar, signed.
double coupling_g_ac(const DeviceParams& p);
// Effective two-photon coupling -Omega_L Omega_k / delta_L, signed.
double raman_coupling(const RamanParams& rp);

enum class FreeParameter { omega_L, delta_L, distance };
enum class MatchSign { signed_equality, magnitude_only };

// Solves raman_coupling(rp) == coupling_g_ac(p) for one parameter in closed
// form and returns its new value. Omega_L and r must come out positive;
// delta_L may take either sign. Throws unmatchable otherwise.
double match_couplings(const DeviceParams& p, const RamanParams& rp, FreeParameter free,
                       MatchSign sign = MatchSign::signed_equality);

struct ResonanceReport {
  double detuning = 0.0;   // omega_c - omega_0, rad/s
  double threshold = 0.0;  // 1e-3 omega_c
  bool resonant = true;    // |detuning| < threshold (strict)
  std::string note;
};

ResonanceReport resonance_report(const DeviceParams& p);

}  // namespace mechtomo::device
