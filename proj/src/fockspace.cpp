#include "mechtomo/fockspace.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "mechtomo/error.hpp"
#include "mechtomo/simd/kernels.hpp"

namespace mechtomo::fock {
namespace {

constexpr const char* kModule = "fockspace";

[[noreturn]] void fail(ErrorKind kind, const std::string& message) {
  throw ContractError(kind, kModule, message);
}

void require_dim(std::size_t dim) {
  if (dim < 2) fail(ErrorKind::invalid_dimension, "mode dimension must be >= 2, got " + std::to_string(dim));
}

void require_same_space(const HilbertSpec& a, const HilbertSpec& b, const char* what) {
  if (!(a == b)) fail(ErrorKind::invalid_dimension, std::string(what) + ": Hilbert spaces differ");
}

}  // namespace

// ---------------------------------------------------------------------------
// HilbertSpec

HilbertSpec::HilbertSpec(std::vector<std::size_t> mode_dims, bool has_atom)
    : mode_dims_(std::move(mode_dims)), has_atom_(has_atom) {
  for (std::size_t d : mode_dims_) require_dim(d);
  if (mode_dims_.empty() && !has_atom_) fail(ErrorKind::invalid_dimension, "empty Hilbert space");
}

std::size_t HilbertSpec::total_dim() const {
  const std::size_t modes =
      std::accumulate(mode_dims_.begin(), mode_dims_.end(), std::size_t{1}, std::multiplies<>());
  return modes * (has_atom_ ? 2 : 1);
}

std::size_t HilbertSpec::factor_dim(std::size_t factor) const {
  if (factor >= factor_count()) fail(ErrorKind::invalid_index, "factor index out of range");
  if (has_atom_) return factor == 0 ? 2 : mode_dims_[factor - 1];
  return mode_dims_[factor];
}

HilbertSpec combine(const HilbertSpec& a, const HilbertSpec& b) {
  if (b.has_atom()) fail(ErrorKind::contract, "the atom factor must be the leftmost tensor factor");
  std::vector<std::size_t> dims = a.mode_dims();
  dims.insert(dims.end(), b.mode_dims().begin(), b.mode_dims().end());
  return HilbertSpec(std::move(dims), a.has_atom());
}

// ---------------------------------------------------------------------------
// QuantumState

QuantumState QuantumState::pure(HilbertSpec space, CVector amplitudes) {
  if (static_cast<std::size_t>(amplitudes.size()) != space.total_dim()) {
    fail(ErrorKind::invalid_dimension, "amplitude vector size does not match Hilbert space");
  }
  const double norm = amplitudes.norm();
  if (!(std::abs(norm - 1.0) <= kStateTolerance)) {
    fail(ErrorKind::invalid_state, "pure state norm deviates from 1 by " + std::to_string(norm - 1.0));
  }
  return QuantumState(std::move(space), std::move(amplitudes));
}

QuantumState QuantumState::normalized(HilbertSpec space, CVector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) fail(ErrorKind::invalid_state, "cannot normalize a zero vector");
  amplitudes /= norm;
  return pure(std::move(space), std::move(amplitudes));
}

QuantumState QuantumState::mixed(HilbertSpec space, CMatrix rho) {
  const auto n = static_cast<Eigen::Index>(space.total_dim());
  if (rho.rows() != n || rho.cols() != n) {
    fail(ErrorKind::invalid_dimension, "density matrix size does not match Hilbert space");
  }
  if (hermitian_deviation(rho) > kStateTolerance) fail(ErrorKind::invalid_state, "density matrix is not Hermitian");
  const cplx tr = rho.trace();
  if (std::abs(tr.real() - 1.0) > kStateTolerance || std::abs(tr.imag()) > kStateTolerance) {
    fail(ErrorKind::invalid_state, "density matrix trace deviates from 1");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(rho, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10) {
    fail(ErrorKind::invalid_state, "density matrix has a negative eigenvalue");
  }
  return QuantumState(std::move(space), std::move(rho));
}

const CVector& QuantumState::amplitudes() const {
  if (!is_pure()) fail(ErrorKind::invalid_state, "amplitudes requested from a mixed state");
  return std::get<CVector>(data_);
}

CMatrix QuantumState::density() const {
  if (is_pure()) {
    const auto& v = std::get<CVector>(data_);
    return v * v.adjoint();
  }
  return std::get<CMatrix>(data_);
}

double QuantumState::trace() const {
  if (is_pure()) return std::get<CVector>(data_).squaredNorm();
  return std::get<CMatrix>(data_).trace().real();
}

double QuantumState::purity() const {
  if (is_pure()) {
    const double n2 = std::get<CVector>(data_).squaredNorm();
    return n2 * n2;
  }
  return std::get<CMatrix>(data_).squaredNorm();
}

// ---------------------------------------------------------------------------
// ModeOperator

double hermitian_deviation(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
}

ModeOperator::ModeOperator(HilbertSpec space, CMatrix matrix, bool hermitian)
    : space_(std::move(space)), matrix_(std::move(matrix)), hermitian_(hermitian) {
  const auto n = static_cast<Eigen::Index>(space_.total_dim());
  if (matrix_.rows() != n || matrix_.cols() != n) {
    fail(ErrorKind::invalid_dimension, "operator matrix size does not match Hilbert space");
  }
  if (hermitian_ && hermitian_deviation(matrix_) > kStateTolerance) {
    fail(ErrorKind::invalid_operator, "operator flagged Hermitian is not");
  }
}

ModeOperator ModeOperator::adjoint() const { return ModeOperator(space_, matrix_.adjoint(), hermitian_); }

ModeOperator operator+(const ModeOperator& a, const ModeOperator& b) {
  require_same_space(a.space_, b.space_, "operator sum");
  return ModeOperator(a.space_, a.matrix_ + b.matrix_, a.hermitian_ && b.hermitian_);
}

ModeOperator operator-(const ModeOperator& a, const ModeOperator& b) {
  require_same_space(a.space_, b.space_, "operator difference");
  return ModeOperator(a.space_, a.matrix_ - b.matrix_, a.hermitian_ && b.hermitian_);
}

ModeOperator operator*(const ModeOperator& a, const ModeOperator& b) {
  require_same_space(a.space_, b.space_, "operator product");
  return ModeOperator(a.space_, a.matrix_ * b.matrix_, false);
}

ModeOperator operator*(cplx s, const ModeOperator& a) {
  return ModeOperator(a.space_, s * a.matrix_, a.hermitian_ && s.imag() == 0.0);
}

ModeOperator annihilation(std::size_t dim) {
  require_dim(dim);
  CMatrix c = CMatrix::Zero(dim, dim);
  for (std::size_t n = 1; n < dim; ++n) c(n - 1, n) = std::sqrt(static_cast<double>(n));
  return ModeOperator(HilbertSpec::mode(dim), std::move(c));
}

ModeOperator creation(std::size_t dim) { return annihilation(dim).adjoint(); }

ModeOperator number(std::size_t dim) {
  require_dim(dim);
  CMatrix n = CMatrix::Zero(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
  return ModeOperator(HilbertSpec::mode(dim), std::move(n), true);
}

ModeOperator identity(const HilbertSpec& space) {
  const auto n = space.total_dim();
  return ModeOperator(space, CMatrix::Identity(n, n), true);
}

ModeOperator sigma_plus() {
  CMatrix s = CMatrix::Zero(2, 2);
  s(1, 0) = 1.0;
  return ModeOperator(HilbertSpec::atom(), std::move(s));
}

ModeOperator sigma_minus() { return sigma_plus().adjoint(); }

ModeOperator excited_projector() {
  CMatrix p = CMatrix::Zero(2, 2);
  p(1, 1) = 1.0;
  return ModeOperator(HilbertSpec::atom(), std::move(p), true);
}

// ---------------------------------------------------------------------------
// States

void check_truncation(std::size_t dim, double amplitude, const char* module) {
  const double need = amplitude * amplitude + 6.0 * amplitude;
  if (!(need <= static_cast<double>(dim))) {
    throw ContractError(ErrorKind::truncation_too_small, module,
                        "|a|^2 + 6|a| = " + std::to_string(need) + " exceeds dimension " +
                            std::to_string(dim));
  }
}

CVector coherent_amplitudes(std::size_t dim, cplx alpha) {
  CVector v(dim);
  v(0) = std::exp(-0.5 * std::norm(alpha));
  for (std::size_t n = 1; n < dim; ++n) v(n) = v(n - 1) * alpha / std::sqrt(static_cast<double>(n));
  return v;
}

QuantumState make_state(std::size_t dim, const StateSpec& spec) {
  require_dim(dim);
  const HilbertSpec space = HilbertSpec::mode(dim);
  return std::visit(
      [&](const auto& s) -> QuantumState {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Fock>) {
          if (s.n >= dim) fail(ErrorKind::invalid_index, "Fock index " + std::to_string(s.n) + " >= dimension");
          CVector v = CVector::Zero(dim);
          v(s.n) = 1.0;
          return QuantumState::pure(space, std::move(v));
        } else if constexpr (std::is_same_v<T, Coherent>) {
          check_truncation(dim, std::abs(s.alpha));
          return QuantumState::normalized(space, coherent_amplitudes(dim, s.alpha));
        } else if constexpr (std::is_same_v<T, Thermal>) {
          if (!(s.mean_number >= 0.0) || !std::isfinite(s.mean_number)) {
            fail(ErrorKind::invalid_state, "thermal mean number must be finite and >= 0");
          }
          const double ratio = s.mean_number / (1.0 + s.mean_number);
          RVector w(dim);
          w(0) = 1.0;
          for (std::size_t n = 1; n < dim; ++n) w(n) = w(n - 1) * ratio;
          w /= w.sum();
          CMatrix rho = CMatrix::Zero(dim, dim);
          rho.diagonal() = w.cast<cplx>();
          return QuantumState::mixed(space, std::move(rho));
        } else {
          check_truncation(dim, std::abs(s.alpha));
          CVector v = coherent_amplitudes(dim, s.alpha) +
                      std::polar(1.0, s.relative_phase) * coherent_amplitudes(dim, -s.alpha);
          if (v.norm() < 1e-12) fail(ErrorKind::invalid_state, "cat components cancel");
          return QuantumState::normalized(space, std::move(v));
        }
      },
      spec);
}

// ---------------------------------------------------------------------------
// Displacement

ModeOperator displacement(std::size_t dim, cplx mu) {
  require_dim(dim);
  check_truncation(dim, std::abs(mu));
  const CMatrix c = annihilation(dim).matrix();
  // exp(mu c† - mu* c) = exp(-i G) with Hermitian G = i (mu c† - mu* c)
  const CMatrix generator = I_unit * (mu * c.adjoint() - std::conj(mu) * c);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(generator);
  const CVector phases = (-I_unit * solver.eigenvalues().cast<cplx>()).array().exp();
  CMatrix d = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
  return ModeOperator(HilbertSpec::mode(dim), std::move(d));
}

CMatrix displacement_elements(std::size_t dim, cplx mu) {
  require_dim(dim);
  CMatrix d(dim, dim);
  std::vector<double> root(dim);
  for (std::size_t m = 0; m < dim; ++m) root[m] = std::sqrt(static_cast<double>(m));
  d.col(0) = coherent_amplitudes(dim, mu);
  const auto& k = simd::kernels();
  const cplx mu_conj = std::conj(mu);
  for (std::size_t n = 0; n + 1 < dim; ++n) {
    k.displacement_column(d.col(n).data(), root.data(), mu_conj, 1.0 / root[n + 1], d.col(n + 1).data(), dim);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Tensor products

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

ModeOperator tensor(const ModeOperator& a, const ModeOperator& b) {
  return ModeOperator(combine(a.space(), b.space()), kron(a.matrix(), b.matrix()),
                      a.hermitian() && b.hermitian());
}

QuantumState tensor(const QuantumState& a, const QuantumState& b) {
  HilbertSpec space = combine(a.space(), b.space());
  if (a.is_pure() && b.is_pure()) {
    const CVector& va = a.amplitudes();
    const CVector& vb = b.amplitudes();
    CVector v(va.size() * vb.size());
    for (Eigen::Index i = 0; i < va.size(); ++i) v.segment(i * vb.size(), vb.size()) = va(i) * vb;
    return QuantumState::normalized(std::move(space), std::move(v));
  }
  return QuantumState::mixed(std::move(space), kron(a.density(), b.density()));
}

// ---------------------------------------------------------------------------
// Evolution

Propagator::Propagator(const ModeOperator& hamiltonian) : space_(hamiltonian.space()) {
  if (hermitian_deviation(hamiltonian.matrix()) > kEvolveHermitianTolerance) {
    fail(ErrorKind::invalid_operator, "evolution generator is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hamiltonian.matrix());
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
}

CMatrix Propagator::unitary(double t) const {
  if (!std::isfinite(t)) fail(ErrorKind::contract, "evolution time must be finite");
  const CVector phases = (-I_unit * t * eigenvalues_.cast<cplx>()).array().exp();
  return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

QuantumState Propagator::apply(const QuantumState& state, double t) const {
  require_same_space(space_, state.space(), "evolve");
  if (!std::isfinite(t)) fail(ErrorKind::contract, "evolution time must be finite");
  const CVector phases = (-I_unit * t * eigenvalues_.cast<cplx>()).array().exp();
  if (state.is_pure()) {
    CVector coeff = eigenvectors_.adjoint() * state.amplitudes();
    coeff.array() *= phases.array();
    return QuantumState::pure(space_, eigenvectors_ * coeff);
  }
  const CMatrix u = eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
  CMatrix rho = u * state.density() * u.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return QuantumState::mixed(space_, std::move(rho));
}

QuantumState evolve(const ModeOperator& hamiltonian, const QuantumState& state, double t) {
  if (t == 0.0) {
    require_same_space(hamiltonian.space(), state.space(), "evolve");
    if (hermitian_deviation(hamiltonian.matrix()) > kEvolveHermitianTolerance) {
      fail(ErrorKind::invalid_operator, "evolution generator is not Hermitian");
    }
    return state;
  }
  return Propagator(hamiltonian).apply(state, t);
}

// ---------------------------------------------------------------------------
// Partial trace

QuantumState partial_trace(const QuantumState& state, std::span<const std::size_t> keep) {
  const HilbertSpec& space = state.space();
  const std::size_t factors = space.factor_count();
  if (keep.empty()) fail(ErrorKind::invalid_index, "partial_trace: nothing to keep");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] >= factors) fail(ErrorKind::invalid_index, "partial_trace: factor index out of range");
    if (i > 0 && keep[i] <= keep[i - 1]) {
      fail(ErrorKind::invalid_index, "partial_trace: factor indices must be strictly increasing");
    }
  }

  std::vector<std::size_t> dims(factors);
  std::vector<std::size_t> stride(factors);
  for (std::size_t f = 0; f < factors; ++f) dims[f] = space.factor_dim(f);
  std::size_t s = 1;
  for (std::size_t f = factors; f-- > 0;) {
    stride[f] = s;
    s *= dims[f];
  }

  std::vector<bool> kept(factors, false);
  for (std::size_t f : keep) kept[f] = true;
  std::vector<std::size_t> kept_factors;
  std::vector<std::size_t> traced_factors;
  for (std::size_t f = 0; f < factors; ++f) (kept[f] ? kept_factors : traced_factors).push_back(f);

  auto extent = [&](const std::vector<std::size_t>& fs) {
    std::size_t n = 1;
    for (std::size_t f : fs) n *= dims[f];
    return n;
  };
  // full index of (kept multi-index k, traced multi-index t); slowest factor first
  auto offsets = [&](const std::vector<std::size_t>& fs) {
    std::vector<std::size_t> out(extent(fs));
    for (std::size_t i = 0; i < out.size(); ++i) {
      std::size_t rem = i;
      std::size_t off = 0;
      for (std::size_t j = fs.size(); j-- > 0;) {
        off += (rem % dims[fs[j]]) * stride[fs[j]];
        rem /= dims[fs[j]];
      }
      out[i] = off;
    }
    return out;
  };
  const std::vector<std::size_t> kept_off = offsets(kept_factors);
  const std::vector<std::size_t> traced_off = offsets(traced_factors);
  const auto nk = static_cast<Eigen::Index>(kept_off.size());
  const auto nt = static_cast<Eigen::Index>(traced_off.size());

  CMatrix reduced;
  if (state.is_pure()) {
    const CVector& psi = state.amplitudes();
    CMatrix m(nk, nt);
    for (Eigen::Index i = 0; i < nk; ++i)
      for (Eigen::Index t = 0; t < nt; ++t) m(i, t) = psi(kept_off[i] + traced_off[t]);
    reduced = m * m.adjoint();
  } else {
    const CMatrix rho = state.density();
    reduced = CMatrix::Zero(nk, nk);
    for (Eigen::Index i = 0; i < nk; ++i)
      for (Eigen::Index j = 0; j < nk; ++j) {
        cplx acc = 0.0;
        for (Eigen::Index t = 0; t < nt; ++t) acc += rho(kept_off[i] + traced_off[t], kept_off[j] + traced_off[t]);
        reduced(i, j) = acc;
      }
  }
  reduced = 0.5 * (reduced + reduced.adjoint()).eval();

  const bool atom_kept = space.has_atom() && kept[0];
  std::vector<std::size_t> mode_dims;
  for (std::size_t f : kept_factors) {
    if (space.has_atom() && f == 0) continue;
    mode_dims.push_back(dims[f]);
  }
  return QuantumState::mixed(HilbertSpec(std::move(mode_dims), atom_kept), std::move(reduced));
}

// ---------------------------------------------------------------------------
// Observables

cplx expectation(const ModeOperator& op, const QuantumState& state) {
  require_same_space(op.space(), state.space(), "expectation");
  if (state.is_pure()) {
    const CVector& v = state.amplitudes();
    return v.dot(op.matrix() * v);
  }
  return (op.matrix() * state.density()).trace();
}

double fidelity(const QuantumState& pure_reference, const QuantumState& state) {
  if (pure_reference.dim() != state.dim()) fail(ErrorKind::invalid_dimension, "fidelity: dimension mismatch");
  const CVector& ref = pure_reference.amplitudes();
  if (state.is_pure()) return std::norm(ref.dot(state.amplitudes()));
  return ref.dot(state.density() * ref).real();
}

double mean_number(const QuantumState& single_mode) {
  const HilbertSpec& space = single_mode.space();
  if (space.has_atom() || space.mode_dims().size() != 1) {
    fail(ErrorKind::invalid_dimension, "mean_number expects a single-mode state");
  }
  double n = 0.0;
  if (single_mode.is_pure()) {
    const CVector& v = single_mode.amplitudes();
    for (Eigen::Index k = 0; k < v.size(); ++k) n += static_cast<double>(k) * std::norm(v(k));
  } else {
    const CMatrix rho = single_mode.density();
    for (Eigen::Index k = 0; k < rho.rows(); ++k) n += static_cast<double>(k) * rho(k, k).real();
  }
  return n;
}

}  // namespace mechtomo::fock
