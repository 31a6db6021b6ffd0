#pragma once
// Truncated Fock-space linear algebra.
//
// Tensor-product ordering: the two-level atom (when present) is the
// slowest-varying factor, followed by the bosonic modes in the order given,
// so for atom ⊗ photon ⊗ phonon the basis index of |s, n_a, n_c> is
//   s * (d_a * d_c) + n_a * d_c + n_c,   with s = 0 for |g>, 1 for |e>.
//
// Hamiltonians are in angular-frequency units (rad/s) with hbar = 1, so
// evolve(H, state, t) applies exp(-i H t) with t in seconds.

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "mechtomo/types.hpp"

namespace mechtomo::fock {

inline constexpr double kStateTolerance = 1e-12;
inline constexpr double kEvolveHermitianTolerance = 1e-10;

class HilbertSpec {
 public:
  explicit HilbertSpec(std::vector<std::size_t> mode_dims, bool has_atom = false);

  static HilbertSpec mode(std::size_t dim) { return HilbertSpec({dim}, false); }
  static HilbertSpec atom() { return HilbertSpec({}, true); }

  const std::vector<std::size_t>& mode_dims() const { return mode_dims_; }
  bool has_atom() const { return has_atom_; }
  std::size_t total_dim() const;

  // Factors in tensor order; the atom (if present) is factor 0.
  std::size_t factor_count() const { return mode_dims_.size() + (has_atom_ ? 1 : 0); }
  std::size_t factor_dim(std::size_t factor) const;

  bool operator==(const HilbertSpec&) const = default;

 private:
  std::vector<std::size_t> mode_dims_;
  bool has_atom_;
};

// Kronecker concatenation of two spaces; an atom may only appear in the left factor.
HilbertSpec combine(const HilbertSpec& a, const HilbertSpec& b);

class QuantumState {
 public:
  // Validates norm within kStateTolerance.
  static QuantumState pure(HilbertSpec space, CVector amplitudes);
  // Rescales to unit norm first; throws for a zero vector.
  static QuantumState normalized(HilbertSpec space, CVector amplitudes);
  // Validates Hermiticity, unit trace and eigenvalues >= -1e-10.
  static QuantumState mixed(HilbertSpec space, CMatrix rho);

  bool is_pure() const { return std::holds_alternative<CVector>(data_); }
  const HilbertSpec& space() const { return space_; }
  std::size_t dim() const { return space_.total_dim(); }

  // Throws for mixed states.
  const CVector& amplitudes() const;
  CMatrix density() const;

  double trace() const;
  double purity() const;

 private:
  QuantumState(HilbertSpec space, std::variant<CVector, CMatrix> data)
      : space_(std::move(space)), data_(std::move(data)) {}

  HilbertSpec space_;
  std::variant<CVector, CMatrix> data_;
};

class ModeOperator {
 public:
  // hermitian = true asserts M = M† within 1e-12 relative to the largest entry.
  ModeOperator(HilbertSpec space, CMatrix matrix, bool hermitian = false);

  const HilbertSpec& space() const { return space_; }
  const CMatrix& matrix() const { return matrix_; }
  bool hermitian() const { return hermitian_; }
  std::size_t dim() const { return space_.total_dim(); }

  ModeOperator adjoint() const;

  friend ModeOperator operator+(const ModeOperator& a, const ModeOperator& b);
  friend ModeOperator operator-(const ModeOperator& a, const ModeOperator& b);
  friend ModeOperator operator*(const ModeOperator& a, const ModeOperator& b);
  friend ModeOperator operator*(cplx s, const ModeOperator& a);

 private:
  HilbertSpec space_;
  CMatrix matrix_;
  bool hermitian_;
};

// Largest |M - M†| entry divided by max(1, largest |M| entry).
double hermitian_deviation(const CMatrix& m);

ModeOperator annihilation(std::size_t dim);
ModeOperator creation(std::size_t dim);
ModeOperator number(std::size_t dim);
ModeOperator identity(const HilbertSpec& space);

// Atom operators on the bare two-level space (|g> = 0, |e> = 1).
ModeOperator sigma_plus();
ModeOperator sigma_minus();
ModeOperator excited_projector();

struct Fock {
  std::size_t n;
};
struct Coherent {
  cplx alpha;
};
struct Thermal {
  double mean_number;
};
struct Cat {
  cplx alpha;
  double relative_phase = 0.0;
};
using StateSpec = std::variant<Fock, Coherent, Thermal, Cat>;

// Throws truncation_too_small unless |a|^2 + 6|a| <= dim.
void check_truncation(std::size_t dim, double amplitude, const char* module = "fockspace");

QuantumState make_state(std::size_t dim, const StateSpec& spec);
// Truncated coherent amplitudes alpha^n e^{-|alpha|^2/2}/sqrt(n!), not renormalized.
CVector coherent_amplitudes(std::size_t dim, cplx alpha);

// exp(mu c† - mu* c) built from the eigendecomposition of the truncated
// generator; unitary to rounding.
ModeOperator displacement(std::size_t dim, cplx mu);
// Matrix elements <m|D(mu)|n> of the untruncated operator for m, n < dim.
CMatrix displacement_elements(std::size_t dim, cplx mu);

ModeOperator tensor(const ModeOperator& a, const ModeOperator& b);
QuantumState tensor(const QuantumState& a, const QuantumState& b);

// Caches the eigendecomposition of a Hermitian generator.
class Propagator {
 public:
  explicit Propagator(const ModeOperator& hamiltonian);

  CMatrix unitary(double t) const;
  QuantumState apply(const QuantumState& state, double t) const;
  const RVector& eigenvalues() const { return eigenvalues_; }

 private:
  HilbertSpec space_;
  RVector eigenvalues_;
  CMatrix eigenvectors_;
};

QuantumState evolve(const ModeOperator& hamiltonian, const QuantumState& state, double t);

// keep lists factor indices (atom = 0 when present) in increasing order.
QuantumState partial_trace(const QuantumState& state, std::span<const std::size_t> keep);

cplx expectation(const ModeOperator& op, const QuantumState& state);
// <psi|rho|psi> for a pure reference state.
double fidelity(const QuantumState& pure_reference, const QuantumState& state);
double mean_number(const QuantumState& single_mode);

}  // namespace mechtomo::fock
