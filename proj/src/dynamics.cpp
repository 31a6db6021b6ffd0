#include "mechtomo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mechtomo/error.hpp"
#include "mechtomo/probability.hpp"

namespace mechtomo::dynamics {
namespace {

constexpr const char* kModule = "dynamics";

[[noreturn]] void fail(ErrorKind kind, const std::string& message) {
  throw ContractError(kind, kModule, message);
}

void require_dim(std::size_t dim) {
  if (dim < 2) fail(ErrorKind::invalid_dimension, "mode dimension must be >= 2");
}

using fock::HilbertSpec;
using fock::ModeOperator;
using fock::QuantumState;

ModeOperator mode_identity(std::size_t dim) { return fock::identity(HilbertSpec::mode(dim)); }

// Splits a single-mode state into (weight, pure vector) pairs.
std::vector<std::pair<double, CVector>> pure_components(const QuantumState& state) {
  std::vector<std::pair<double, CVector>> out;
  if (state.is_pure()) {
    out.emplace_back(1.0, state.amplitudes());
    return out;
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(state.density());
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    const double w = solver.eigenvalues()(k);
    if (w > 1e-15) out.emplace_back(w, solver.eigenvectors().col(k));
  }
  return out;
}

void require_single_mode(const QuantumState& state, const char* what) {
  if (state.space().has_atom() || state.space().mode_dims().size() != 1) {
    fail(ErrorKind::invalid_dimension, std::string(what) + ": expected a single-mode state");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

AtomMixture AtomMixture::with_excited(double rho_e) {
  AtomMixture am{rho_e, 1.0 - rho_e};
  am.validate();
  return am;
}

void AtomMixture::validate() const {
  auto in_unit = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
  if (!in_unit(rho_e) || !in_unit(rho_g) || std::abs(rho_e + rho_g - 1.0) > 1e-12) {
    fail(ErrorKind::invalid_state, "atomic populations must lie in [0,1] and sum to 1");
  }
}

void CouplingSet::validate() const {
  if (!std::isfinite(g_ac) || !std::isfinite(g_raman)) fail(ErrorKind::contract, "couplings must be finite");
  if (matched && std::abs(g_ac - g_raman) > 1e-9 * std::abs(g_ac)) {
    fail(ErrorKind::contract, "coupling set flagged matched but g_ac != g_raman");
  }
}

// ---------------------------------------------------------------------------
// Hamiltonians

ModeOperator jc_hamiltonian(double lambda, std::size_t dim) {
  require_dim(dim);
  const ModeOperator c = fock::annihilation(dim);
  const ModeOperator h = fock::tensor(fock::sigma_minus(), c.adjoint()) + fock::tensor(fock::sigma_plus(), c);
  return ModeOperator(h.space(), lambda * h.matrix(), true);
}

ModeOperator two_mode_hamiltonian(const CouplingSet& cs, std::size_t dim_photon, std::size_t dim_phonon) {
  require_dim(dim_photon);
  require_dim(dim_phonon);
  cs.validate();
  const ModeOperator a = fock::annihilation(dim_photon);
  const ModeOperator c = fock::annihilation(dim_phonon);
  const ModeOperator id_a = mode_identity(dim_photon);
  const ModeOperator id_c = mode_identity(dim_phonon);
  const ModeOperator magnetic = fock::tensor(fock::sigma_minus(), fock::tensor(id_a, c.adjoint())) +
                                fock::tensor(fock::sigma_plus(), fock::tensor(id_a, c));
  const ModeOperator raman = fock::tensor(fock::sigma_plus(), fock::tensor(a, id_c)) +
                             fock::tensor(fock::sigma_minus(), fock::tensor(a.adjoint(), id_c));
  CMatrix h = cs.g_ac * magnetic.matrix() + cs.g_raman * raman.matrix();
  return ModeOperator(magnetic.space(), std::move(h), true);
}

ModeOperator total_excitation(std::size_t dim_photon, std::size_t dim_phonon) {
  require_dim(dim_photon);
  require_dim(dim_phonon);
  const ModeOperator id_a = mode_identity(dim_photon);
  const ModeOperator id_c = mode_identity(dim_phonon);
  return fock::tensor(fock::excited_projector(), fock::tensor(id_a, id_c)) +
         fock::tensor(fock::identity(HilbertSpec::atom()), fock::tensor(fock::number(dim_photon), id_c)) +
         fock::tensor(fock::identity(HilbertSpec::atom()), fock::tensor(id_a, fock::number(dim_phonon)));
}

ModeOperator composite_mode(std::size_t dim_photon, std::size_t dim_phonon) {
  require_dim(dim_photon);
  require_dim(dim_phonon);
  const ModeOperator sum = fock::tensor(fock::annihilation(dim_photon), mode_identity(dim_phonon)) +
                           fock::tensor(mode_identity(dim_photon), fock::annihilation(dim_phonon));
  return (1.0 / std::sqrt(2.0)) * sum;
}

ModeOperator classical_drive_hamiltonian(double g_ac, double g_raman, double intensity, double phi,
                                         std::size_t dim_phonon) {
  require_dim(dim_phonon);
  if (!(intensity >= 0.0)) fail(ErrorKind::invalid_intensity, "drive intensity must be >= 0");
  const ModeOperator c = fock::annihilation(dim_phonon);
  const ModeOperator id_c = mode_identity(dim_phonon);
  const cplx drive = g_raman * std::sqrt(intensity) * std::polar(1.0, phi);
  const ModeOperator magnetic = fock::tensor(fock::sigma_minus(), c.adjoint()) + fock::tensor(fock::sigma_plus(), c);
  const ModeOperator field = fock::tensor(drive * fock::sigma_plus() + std::conj(drive) * fock::sigma_minus(), id_c);
  return ModeOperator(magnetic.space(), g_ac * magnetic.matrix() + field.matrix(), true);
}

// ---------------------------------------------------------------------------
// Probabilities

double pe_closed_form(const QuantumState& mode_state, const AtomMixture& am, double lambda, double tau) {
  require_single_mode(mode_state, "pe_closed_form");
  am.validate();
  double average = 0.0;
  if (mode_state.is_pure()) {
    const CVector& v = mode_state.amplitudes();
    for (Eigen::Index n = 0; n < v.size(); ++n) {
      average += std::norm(v(n)) * std::cos(2.0 * lambda * tau * std::sqrt(static_cast<double>(n + 1)));
    }
  } else {
    const CMatrix rho = mode_state.density();
    for (Eigen::Index n = 0; n < rho.rows(); ++n) {
      average += rho(n, n).real() * std::cos(2.0 * lambda * tau * std::sqrt(static_cast<double>(n + 1)));
    }
  }
  return checked_probability(0.5 + 0.5 * am.inversion() * average, kModule);
}

double pe_exact_unitary(const QuantumState& initial, const ModeOperator& hamiltonian, double tau) {
  if (!initial.space().has_atom()) fail(ErrorKind::invalid_dimension, "initial state has no atom factor");
  if (!(initial.space() == hamiltonian.space())) {
    fail(ErrorKind::invalid_dimension, "initial state and Hamiltonian act on different spaces");
  }
  const QuantumState evolved = fock::evolve(hamiltonian, initial, tau);
  const auto half = static_cast<Eigen::Index>(evolved.dim() / 2);
  double pe = 0.0;
  if (evolved.is_pure()) {
    pe = evolved.amplitudes().tail(half).squaredNorm();
  } else {
    pe = evolved.density().diagonal().tail(half).real().sum();
  }
  return checked_probability(pe, kModule);
}

std::size_t photon_truncation(double intensity) {
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) fail(ErrorKind::invalid_intensity, "intensity must be >= 0");
  return static_cast<std::size_t>(std::ceil(intensity + 6.0 * std::sqrt(intensity) + 10.0));
}

// ---------------------------------------------------------------------------
// Excitation blocks

ExcitationBlocks::ExcitationBlocks(const CouplingSet& cs, std::size_t dim_photon, std::size_t dim_phonon)
    : dim_photon_(dim_photon), dim_phonon_(dim_phonon), g_ac_(cs.g_ac), g_raman_(cs.g_raman) {
  require_dim(dim_photon);
  require_dim(dim_phonon);
  cs.validate();
  const std::size_t da = dim_photon;
  const std::size_t dc = dim_phonon;
  const std::size_t plane = da * dc;
  const std::size_t max_excitation = (da - 1) + (dc - 1) + 1;
  blocks_.reserve(max_excitation + 1);

  for (std::size_t n_total = 0; n_total <= max_excitation; ++n_total) {
    Block block;
    // |g, n_a, n_c> with n_a + n_c = N
    auto add_states = [&](std::size_t excitations, std::size_t atom_offset) {
      if (excitations > (da - 1) + (dc - 1)) return;
      const std::size_t nc_lo = excitations > da - 1 ? excitations - (da - 1) : 0;
      const std::size_t nc_hi = std::min(excitations, dc - 1);
      for (std::size_t nc = nc_lo; nc <= nc_hi; ++nc) {
        block.index.push_back(atom_offset + (excitations - nc) * dc + nc);
      }
    };
    add_states(n_total, 0);
    block.excited_begin = block.index.size();
    if (n_total >= 1) add_states(n_total - 1, plane);

    const auto size = static_cast<Eigen::Index>(block.index.size());
    CMatrix h = CMatrix::Zero(size, size);
    auto locate = [&](std::size_t dense) -> Eigen::Index {
      const auto it = std::find(block.index.begin(), block.index.end(), dense);
      return it == block.index.end() ? -1 : static_cast<Eigen::Index>(it - block.index.begin());
    };
    for (std::size_t j = block.excited_begin; j < block.index.size(); ++j) {
      const std::size_t local = block.index[j] - plane;
      const std::size_t na = local / dc;
      const std::size_t nc = local % dc;
      if (nc + 1 < dc) {
        const Eigen::Index i = locate(na * dc + nc + 1);
        h(i, static_cast<Eigen::Index>(j)) += g_ac_ * std::sqrt(static_cast<double>(nc + 1));
      }
      if (na + 1 < da) {
        const Eigen::Index i = locate((na + 1) * dc + nc);
        h(i, static_cast<Eigen::Index>(j)) += g_raman_ * std::sqrt(static_cast<double>(na + 1));
      }
    }
    h += h.adjoint().eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
    block.energies = solver.eigenvalues();
    block.vectors = solver.eigenvectors();
    blocks_.push_back(std::move(block));
  }
}

CVector ExcitationBlocks::evolve(const CVector& psi, double tau) const {
  if (static_cast<std::size_t>(psi.size()) != dim()) fail(ErrorKind::invalid_dimension, "vector size mismatch");
  CVector out = CVector::Zero(psi.size());
  for (const Block& block : blocks_) {
    const auto size = static_cast<Eigen::Index>(block.index.size());
    CVector local(size);
    for (Eigen::Index i = 0; i < size; ++i) local(i) = psi(block.index[i]);
    if (local.squaredNorm() == 0.0) continue;
    CVector coeff = block.vectors.adjoint() * local;
    for (Eigen::Index i = 0; i < size; ++i) coeff(i) *= std::polar(1.0, -block.energies(i) * tau);
    local = block.vectors * coeff;
    for (Eigen::Index i = 0; i < size; ++i) out(block.index[i]) = local(i);
  }
  return out;
}

std::vector<double> ExcitationBlocks::excited_probability(const CVector& psi, std::span<const double> taus) const {
  if (static_cast<std::size_t>(psi.size()) != dim()) fail(ErrorKind::invalid_dimension, "vector size mismatch");
  std::vector<double> pe(taus.size(), 0.0);
  for (const Block& block : blocks_) {
    const auto size = static_cast<Eigen::Index>(block.index.size());
    const auto excited = static_cast<Eigen::Index>(block.excited_begin);
    if (excited == size) continue;
    CVector local(size);
    for (Eigen::Index i = 0; i < size; ++i) local(i) = psi(block.index[i]);
    if (local.squaredNorm() < 1e-300) continue;
    const CVector coeff = block.vectors.adjoint() * local;
    const CMatrix excited_rows = block.vectors.bottomRows(size - excited);
    CVector phased(size);
    for (std::size_t t = 0; t < taus.size(); ++t) {
      for (Eigen::Index i = 0; i < size; ++i) phased(i) = coeff(i) * std::polar(1.0, -block.energies(i) * taus[t]);
      pe[t] += (excited_rows * phased).squaredNorm();
    }
  }
  return pe;
}

// ---------------------------------------------------------------------------

std::vector<double> pe_two_mode(const QuantumState& cantilever, const AtomMixture& am, const CouplingSet& cs,
                                double intensity, double phi, std::span<const double> taus, std::size_t dim_photon) {
  require_single_mode(cantilever, "pe_two_mode");
  am.validate();
  if (!(intensity > 0.0)) fail(ErrorKind::invalid_intensity, "photon intensity must be > 0");
  if (dim_photon == 0) dim_photon = photon_truncation(intensity);
  const std::size_t dc = cantilever.dim();
  const ExcitationBlocks blocks(cs, dim_photon, dc);

  const CVector photon = fock::coherent_amplitudes(dim_photon, std::polar(std::sqrt(intensity), phi));
  const CVector photon_normed = photon / photon.norm();
  std::vector<double> pe(taus.size(), 0.0);
  const std::size_t plane = dim_photon * dc;
  for (const auto& [weight, vec] : pure_components(cantilever)) {
    for (int atom = 0; atom < 2; ++atom) {
      const double atom_weight = atom == 1 ? am.rho_e : am.rho_g;
      if (atom_weight == 0.0) continue;
      CVector psi = CVector::Zero(blocks.dim());
      for (std::size_t na = 0; na < dim_photon; ++na) {
        psi.segment(atom * plane + na * dc, dc) = photon_normed(na) * vec;
      }
      const std::vector<double> part = blocks.excited_probability(psi, taus);
      for (std::size_t t = 0; t < taus.size(); ++t) pe[t] += weight * atom_weight * part[t];
    }
  }
  for (double& p : pe) p = checked_probability(p, kModule);
  return pe;
}

std::vector<double> pe_classical_drive(const QuantumState& cantilever, const AtomMixture& am, const CouplingSet& cs,
                                       double intensity, double phi, std::span<const double> taus) {
  require_single_mode(cantilever, "pe_classical_drive");
  am.validate();
  const std::size_t dc = cantilever.dim();
  const fock::Propagator propagator(classical_drive_hamiltonian(cs.g_ac, cs.g_raman, intensity, phi, dc));
  std::vector<double> pe(taus.size(), 0.0);
  for (const auto& [weight, vec] : pure_components(cantilever)) {
    for (int atom = 0; atom < 2; ++atom) {
      const double atom_weight = atom == 1 ? am.rho_e : am.rho_g;
      if (atom_weight == 0.0) continue;
      CVector psi = CVector::Zero(2 * dc);
      psi.segment(atom * dc, dc) = vec;
      const QuantumState initial = QuantumState::normalized(HilbertSpec({dc}, true), psi);
      for (std::size_t t = 0; t < taus.size(); ++t) {
        const QuantumState out = propagator.apply(initial, taus[t]);
        pe[t] += weight * atom_weight * out.amplitudes().tail(dc).squaredNorm();
      }
    }
  }
  for (double& p : pe) p = checked_probability(p, kModule);
  return pe;
}

}  // namespace mechtomo::dynamics
