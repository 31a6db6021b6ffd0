#include "mechtomo/backaction.hpp"

#include <cmath>
#include <random>

#include "mechtomo/dynamics.hpp"
#include "mechtomo/error.hpp"

namespace mechtomo::backaction {
namespace {

constexpr const char* kModule = "backaction";

[[noreturn]] void fail(ErrorKind kind, const std::string& message) {
  throw ContractError(kind, kModule, message);
}

void require_pure_mode(const fock::QuantumState& psi) {
  if (psi.space().has_atom() || psi.space().mode_dims().size() != 1) {
    fail(ErrorKind::invalid_dimension, "cantilever state must be single-mode");
  }
  if (!psi.is_pure()) fail(ErrorKind::invalid_state, "cantilever state must be pure");
}

void require_probe(double g, double tau, const RamanSetting& raman) {
  if (!std::isfinite(g) || !std::isfinite(tau) || tau < 0.0 || !std::isfinite(raman.phi)) {
    fail(ErrorKind::contract, "probe needs finite g, phi and tau >= 0");
  }
  if (!std::isfinite(raman.intensity) || raman.intensity < 0.0) {
    fail(ErrorKind::invalid_intensity, "Raman intensity must be >= 0");
  }
}

const char* outcome_name(Outcome o) { return o == Outcome::ground ? "ground" : "excited"; }

UpdateResult finish(fock::QuantumState state, double probability) {
  UpdateResult r{std::move(state), probability, 1.0};
  r.purity = r.state.purity();
  return r;
}

void require_probable(double p, Outcome outcome) {
  if (!(p >= kMinOutcomeProbability)) {
    fail(ErrorKind::improbable_outcome,
         std::string(outcome_name(outcome)) + " outcome probability " + std::to_string(p) + " is below 1e-12");
  }
}

}  // namespace

CMatrix large_i_operator(std::size_t dim, Outcome outcome, double g, double tau, const RamanSetting& raman) {
  require_probe(g, tau, raman);
  const cplx mu = I_unit * g * tau * std::polar(1.0, raman.phi);
  const double theta = 2.0 * g * tau * std::sqrt(raman.intensity);
  const CMatrix plus = fock::displacement(dim, 0.5 * mu).matrix();
  const CMatrix minus = plus.adjoint();
  const cplx a = std::polar(1.0, 0.5 * theta);
  const cplx b = std::conj(a);
  if (outcome == Outcome::ground) return 0.5 * (a * plus + b * minus);
  return -0.5 * std::polar(1.0, raman.phi) * (a * plus - b * minus);
}

UpdateResult conditional_update(const fock::QuantumState& psi_c, Outcome outcome, double g, double tau,
                                const RamanSetting& raman, UpdateMode mode, std::size_t dim_photon) {
  require_pure_mode(psi_c);
  require_probe(g, tau, raman);
  const std::size_t dc = psi_c.dim();
  const fock::HilbertSpec mode_space = psi_c.space();

  switch (mode) {
    case UpdateMode::large_i: {
      const CVector out = large_i_operator(dc, outcome, g, tau, raman) * psi_c.amplitudes();
      const double p = out.squaredNorm();
      require_probable(p, outcome);
      return finish(fock::QuantumState::normalized(mode_space, out), p);
    }
    case UpdateMode::classical_exact: {
      const fock::ModeOperator h = dynamics::classical_drive_hamiltonian(g, g, raman.intensity, raman.phi, dc);
      CVector psi = CVector::Zero(2 * dc);
      psi.head(dc) = psi_c.amplitudes();
      const fock::QuantumState evolved =
          fock::evolve(h, fock::QuantumState::pure(fock::HilbertSpec({dc}, true), psi), tau);
      const CVector part = outcome == Outcome::ground ? evolved.amplitudes().head(dc).eval()
                                                      : evolved.amplitudes().tail(dc).eval();
      const double p = part.squaredNorm();
      require_probable(p, outcome);
      return finish(fock::QuantumState::normalized(mode_space, part), p);
    }
    case UpdateMode::exact: {
      if (!(raman.intensity > 0.0)) fail(ErrorKind::invalid_intensity, "exact mode needs I > 0");
      const std::size_t dp = dim_photon ? dim_photon : dynamics::photon_truncation(raman.intensity);
      const dynamics::ExcitationBlocks blocks(dynamics::CouplingSet::matched_at(g), dp, dc);
      CVector photon = fock::coherent_amplitudes(dp, std::polar(std::sqrt(raman.intensity), raman.phi));
      photon /= photon.norm();
      CVector psi = CVector::Zero(blocks.dim());
      for (std::size_t na = 0; na < dp; ++na) psi.segment(na * dc, dc) = photon(na) * psi_c.amplitudes();
      const CVector out = blocks.evolve(psi, tau);
      const std::size_t offset = outcome == Outcome::ground ? 0 : dp * dc;
      CMatrix rho = CMatrix::Zero(dc, dc);
      for (std::size_t na = 0; na < dp; ++na) {
        const auto v = out.segment(offset + na * dc, dc);
        rho.noalias() += v * v.adjoint();
      }
      const double p = rho.trace().real();
      require_probable(p, outcome);
      rho /= p;
      rho = 0.5 * (rho + rho.adjoint()).eval();
      return finish(fock::QuantumState::mixed(mode_space, rho), p);
    }
  }
  fail(ErrorKind::contract, "unknown update mode");
}

TrajectoryLog run_sequence(const fock::QuantumState& psi0, std::size_t steps, const std::vector<ScheduleEntry>& schedule,
                           double g, const SequencePolicy& policy, const std::string& initial,
                           const FreeEvolution& free_evolution) {
  require_pure_mode(psi0);
  if (schedule.size() != steps) {
    fail(ErrorKind::contract, "schedule has " + std::to_string(schedule.size()) + " entries for " +
                                  std::to_string(steps) + " steps");
  }
  TrajectoryLog log;
  log.initial = initial;
  log.snapshots.push_back(psi0);
  log.purity.push_back(psi0.purity());
  log.mean_phonon.push_back(fock::mean_number(psi0));

  std::mt19937_64 rng(policy.seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  fock::QuantumState current = psi0;
  const std::size_t dim = psi0.dim();
  for (std::size_t i = 0; i < steps; ++i) {
    const ScheduleEntry& entry = schedule[i];
    const CVector& psi = current.amplitudes();
    const CVector ground = large_i_operator(dim, Outcome::ground, g, entry.tau, entry.raman) * psi;
    const CVector excited = large_i_operator(dim, Outcome::excited, g, entry.tau, entry.raman) * psi;

    MeasurementStep step;
    step.tau = entry.tau;
    step.raman = entry.raman;
    step.p_ground = ground.squaredNorm();
    step.p_excited = excited.squaredNorm();
    if (policy.kind == SequencePolicy::Kind::condition_on_ground) {
      step.outcome = Outcome::ground;
    } else {
      step.outcome = uniform(rng) < step.p_ground ? Outcome::ground : Outcome::excited;
    }
    const CVector& chosen = step.outcome == Outcome::ground ? ground : excited;
    step.probability = step.outcome == Outcome::ground ? step.p_ground : step.p_excited;
    require_probable(step.probability, step.outcome);

    current = fock::QuantumState::normalized(current.space(), chosen);
    if (free_evolution) current = free_evolution(current, i);
    log.joint_probability *= step.probability;
    log.steps.push_back(step);
    log.snapshots.push_back(current);
    log.purity.push_back(current.purity());
    log.mean_phonon.push_back(fock::mean_number(current));
  }
  return log;
}

std::vector<phase::WignerGrid> snapshots(const TrajectoryLog& log, const SnapshotSpec& spec) {
  std::vector<phase::WignerGrid> out;
  out.reserve(log.snapshots.size());
  for (const auto& s : log.snapshots) out.push_back(phase::wigner_fock(s.density(), spec.x, spec.p));
  return out;
}

std::vector<DisturbanceRow> disturbance_report(const TrajectoryLog& log, const std::vector<phase::WignerGrid>& grids,
                                               double direction) {
  if (log.snapshots.empty()) fail(ErrorKind::contract, "empty trajectory log");
  if (grids.size() != log.snapshots.size()) fail(ErrorKind::contract, "one Wigner grid per snapshot expected");
  std::vector<DisturbanceRow> rows;
  const fock::QuantumState& reference = log.snapshots.front();
  for (std::size_t i = 0; i < log.snapshots.size(); ++i) {
    DisturbanceRow row;
    row.step = i;
    row.fidelity = reference.is_pure() ? fock::fidelity(reference, log.snapshots[i]) : std::nan("");
    row.mean_phonon = log.mean_phonon[i];
    row.purity = log.purity[i];
    row.negativity = phase::negativity_volume(grids[i]);
    row.spread = phase::support_spread(grids[i], direction);
    row.integral = grids[i].integral();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mechtomo::backaction
