#pragma once
// Conditional evolution of the cantilever under repeated detector-atom probes.
//
// Large-I maps (classical Raman field sqrt(I) e^{i phi}, theta = 2 g tau sqrt(I),
// mu = i g tau e^{i phi}):
//   M_g =  1/2          [e^{ i theta/2} D( mu/2) + e^{-i theta/2} D(-mu/2)]
//   M_e = -e^{i phi}/2  [e^{ i theta/2} D( mu/2) - e^{-i theta/2} D(-mu/2)]
// with M_g† M_g + M_e† M_e = 1.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mechtomo/fockspace.hpp"
#include "mechtomo/phasespace.hpp"

namespace mechtomo::backaction {

enum class Outcome { ground, excited };

struct RamanSetting {
  double intensity = 400.0;
  double phi = 0.0;
};

enum class UpdateMode {
  exact,            // quantized coherent photon field, matched couplings; returns the reduced density matrix
  large_i,          // M_g / M_e above; pure in, pure out
  classical_exact,  // exact atom-cantilever evolution with the c-number Raman drive
};

struct UpdateResult {
  fock::QuantumState state;
  double probability = 0.0;  // Born probability of the requested outcome
  double purity = 1.0;
};

inline constexpr double kMinOutcomeProbability = 1e-12;

// psi_c must be a pure single-mode state; the atom starts in |g>.
// dim_photon = 0 picks dynamics::photon_truncation(I) in exact mode.
// Throws improbable_outcome when the outcome probability is below 1e-12.
UpdateResult conditional_update(const fock::QuantumState& psi_c, Outcome outcome, double g, double tau,
                                const RamanSetting& raman, UpdateMode mode, std::size_t dim_photon = 0);

// The large-I measurement operator, exposed for tests.
CMatrix large_i_operator(std::size_t dim, Outcome outcome, double g, double tau, const RamanSetting& raman);

struct ScheduleEntry {
  double tau = 0.0;
  RamanSetting raman;
};

struct SequencePolicy {
  enum class Kind { condition_on_ground, sample_outcomes };
  Kind kind = Kind::condition_on_ground;
  std::uint64_t seed = 0;
};

struct MeasurementStep {
  Outcome outcome = Outcome::ground;
  double tau = 0.0;
  RamanSetting raman;
  double probability = 0.0;  // of the recorded outcome
  double p_ground = 0.0;
  double p_excited = 0.0;
};

struct TrajectoryLog {
  std::string initial;                       // state descriptor
  std::vector<MeasurementStep> steps;
  std::vector<fock::QuantumState> snapshots;  // snapshots[0] is the initial state
  std::vector<double> purity;
  std::vector<double> mean_phonon;
  double joint_probability = 1.0;
};

// Applied to the cantilever after each step; empty means identity.
using FreeEvolution = std::function<fock::QuantumState(const fock::QuantumState&, std::size_t step)>;

// Iterates the large-I update. schedule.size() must equal steps.
TrajectoryLog run_sequence(const fock::QuantumState& psi0, std::size_t steps, const std::vector<ScheduleEntry>& schedule,
                           double g, const SequencePolicy& policy = {}, const std::string& initial = "",
                           const FreeEvolution& free_evolution = {});

struct DisturbanceRow {
  std::size_t step = 0;
  double fidelity = 1.0;  // with the initial state
  double mean_phonon = 0.0;
  double purity = 1.0;
  double negativity = 0.0;  // Wigner negativity volume on the snapshot grid
  double spread = 0.0;      // support_spread along the probe direction
  double integral = 1.0;    // snapshot grid integral
};

// Snapshot grid for disturbance reports and plots.
struct SnapshotSpec {
  phase::Axis x = phase::Axis::linspace(-5.0, 5.0, 201);
  phase::Axis p = phase::Axis::linspace(-15.0, 15.0, 301);
  double direction = 1.5707963267948966;  // arg(mu) of the probes; pi/2 for mu = 4.15i
};

std::vector<phase::WignerGrid> snapshots(const TrajectoryLog& log, const SnapshotSpec& spec);
std::vector<DisturbanceRow> disturbance_report(const TrajectoryLog& log, const std::vector<phase::WignerGrid>& grids,
                                               double direction);

}  // namespace mechtomo::backaction
