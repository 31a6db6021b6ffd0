#pragma once
// Interaction-picture Jaynes-Cummings dynamics of the detector atom coupled to
// the cantilever mode and the Raman photon mode, plus excited-state
// probabilities from the closed-form expression and from exact evolution.

#include <cstddef>
#include <span>
#include <vector>

#include "mechtomo/fockspace.hpp"

namespace mechtomo::dynamics {

struct AtomMixture {
  double rho_e = 0.0;
  double rho_g = 1.0;

  static AtomMixture excited() { return {1.0, 0.0}; }
  static AtomMixture ground() { return {0.0, 1.0}; }
  // rho_g = 1 - rho_e; throws for rho_e outside [0, 1].
  static AtomMixture with_excited(double rho_e);

  void validate() const;
  double inversion() const { return rho_e - rho_g; }
};

struct CouplingSet {
  double g_ac = 0.0;     // atom-cantilever, rad/s
  double g_raman = 0.0;  // atom-photon (Raman), rad/s
  bool matched = false;

  static CouplingSet matched_at(double g) { return {g, g, true}; }
  // Throws when the matched flag is set but |g_ac - g_raman| > 1e-9 |g|.
  void validate() const;
  double g() const { return g_ac; }
};

// lambda (sigma- c† + sigma+ c) on atom ⊗ mode.
fock::ModeOperator jc_hamiltonian(double lambda, std::size_t dim);

// g_ac (sigma- c† + sigma+ c) + g_raman (a sigma+ + a† sigma-) on atom ⊗ photon ⊗ phonon.
fock::ModeOperator two_mode_hamiltonian(const CouplingSet& cs, std::size_t dim_photon, std::size_t dim_phonon);

// a† a + c† c + sigma+ sigma- on atom ⊗ photon ⊗ phonon.
fock::ModeOperator total_excitation(std::size_t dim_photon, std::size_t dim_phonon);

// (a + c)/sqrt(2) on photon ⊗ phonon.
fock::ModeOperator composite_mode(std::size_t dim_photon, std::size_t dim_phonon);

// Raman field treated as a c-number sqrt(I) e^{i phi}:
// g_ac (sigma- c† + sigma+ c) + g_raman sqrt(I) (e^{i phi} sigma+ + e^{-i phi} sigma-) on atom ⊗ phonon.
fock::ModeOperator classical_drive_hamiltonian(double g_ac, double g_raman, double intensity, double phi,
                                               std::size_t dim_phonon);

// 1/2 + 1/2 (rho_e - rho_g) sum_n p_n cos(2 lambda tau sqrt(n+1)), p_n the
// number distribution of mode_state. The sqrt(n+1) branch is applied to both
// atomic components; for an initially ground atom exact dynamics uses sqrt(n)
// instead (see pe_exact_unitary).
double pe_closed_form(const fock::QuantumState& mode_state, const AtomMixture& am, double lambda, double tau);

// Tr(Pi_e U rho U†) for an initial state that carries the atom factor.
double pe_exact_unitary(const fock::QuantumState& initial, const fock::ModeOperator& hamiltonian, double tau);

// ceil(I + 6 sqrt(I) + 10)
std::size_t photon_truncation(double intensity);

// Exact evolution under two_mode_hamiltonian, split into blocks of fixed
// total excitation number. Vectors use the dense atom ⊗ photon ⊗ phonon layout.
class ExcitationBlocks {
 public:
  ExcitationBlocks(const CouplingSet& cs, std::size_t dim_photon, std::size_t dim_phonon);

  std::size_t dim_photon() const { return dim_photon_; }
  std::size_t dim_phonon() const { return dim_phonon_; }
  std::size_t dim() const { return 2 * dim_photon_ * dim_phonon_; }
  std::size_t block_count() const { return blocks_.size(); }

  CVector evolve(const CVector& psi, double tau) const;

  // Excited-state probabilities at each tau for a pure initial vector.
  std::vector<double> excited_probability(const CVector& psi, std::span<const double> taus) const;

 private:
  struct Block {
    std::vector<std::size_t> index;  // dense indices of the block basis
    RVector energies;
    CMatrix vectors;
    std::size_t excited_begin;  // block basis entries from here on are |e, ...>
  };

  std::size_t dim_photon_;
  std::size_t dim_phonon_;
  double g_ac_;
  double g_raman_;
  std::vector<Block> blocks_;
};

// P_e(tau) for atom mixture ⊗ coherent photon field sqrt(I) e^{i phi} ⊗ cantilever,
// evolved exactly under the two-mode Hamiltonian. Mixed cantilever states are
// split into their eigenvectors.
std::vector<double> pe_two_mode(const fock::QuantumState& cantilever, const AtomMixture& am, const CouplingSet& cs,
                                double intensity, double phi, std::span<const double> taus,
                                std::size_t dim_photon = 0);

// Same initial conditions with the Raman field as a classical drive.
std::vector<double> pe_classical_drive(const fock::QuantumState& cantilever, const AtomMixture& am,
                                       const CouplingSet& cs, double intensity, double phi,
                                       std::span<const double> taus);

}  // namespace mechtomo::dynamics
