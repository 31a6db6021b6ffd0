#pragma once

#include <gtest/gtest.h>

#include <random>

#include "mechtomo/error.hpp"
#include "mechtomo/fockspace.hpp"

namespace mechtomo::testing {

// Runs stmt and checks that it throws a ContractError of the given kind.
#define EXPECT_CONTRACT(stmt, error_kind)                                       \
  do {                                                                          \
    try {                                                                       \
      stmt;                                                                     \
      ADD_FAILURE() << "expected " << ::mechtomo::to_string(error_kind);        \
    } catch (const ::mechtomo::ContractError& e) {                              \
      EXPECT_EQ(e.kind(), error_kind) << e.what();                              \
    }                                                                           \
  } while (0)

inline CVector random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  CVector v(n);
  for (auto& x : v) x = cplx(normal(rng), normal(rng));
  return v;
}

// Random pure state whose amplitudes vanish above `support`.
inline fock::QuantumState random_pure(std::size_t dim, std::size_t support, std::mt19937_64& rng) {
  CVector v = CVector::Zero(dim);
  v.head(support) = random_vector(support, rng);
  return fock::QuantumState::normalized(fock::HilbertSpec::mode(dim), v);
}

// Random mixture of `rank` random pure states supported below `support`.
inline fock::QuantumState random_mixed(std::size_t dim, std::size_t support, std::size_t rank, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.1, 1.0);
  CMatrix rho = CMatrix::Zero(dim, dim);
  double total = 0.0;
  for (std::size_t k = 0; k < rank; ++k) {
    const double w = uniform(rng);
    const CVector v = random_pure(dim, support, rng).amplitudes();
    rho += w * v * v.adjoint();
    total += w;
  }
  rho /= total;
  return fock::QuantumState::mixed(fock::HilbertSpec::mode(dim), rho);
}

inline CMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  CMatrix m(n, n);
  for (std::size_t j = 0; j < n; ++j) m.col(j) = random_vector(n, rng);
  return 0.5 * (m + m.adjoint());
}

}  // namespace mechtomo::testing
