#pragma once
// Phase-space grids and transforms.
//
// Convention: alpha = (x + i p)/sqrt(2) and
//   W(alpha) = (1/pi^2) ∫ C(mu) exp(mu* alpha - mu alpha*) d^2mu,
// so ∫ W d^2alpha = 1, i.e. sum W dx dp / 2 = 1, and the vacuum peaks at 2/pi.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mechtomo/types.hpp"

namespace mechtomo::phase {

struct Axis {
  double min = 0.0;
  double step = 1.0;
  std::size_t count = 0;

  double at(std::size_t i) const { return min + static_cast<double>(i) * step; }
  double max() const { return at(count == 0 ? 0 : count - 1); }
  // Nodes (k - count/2) step, k = 0..count-1; zero is always a node.
  static Axis centered(std::size_t count, double step);
  // count nodes from lo to hi inclusive.
  static Axis linspace(double lo, double hi, std::size_t count);

  bool operator==(const Axis&) const = default;
};

struct WignerGrid {
  Axis x;
  Axis p;
  std::vector<double> values;  // values[ix * p.count + ip]
  double imag_residue = 0.0;   // largest |Im W| seen before discarding it
  std::vector<std::string> warnings;

  double at(std::size_t ix, std::size_t ip) const { return values[ix * p.count + ip]; }
  // sum W dx dp / 2
  double integral() const;
  double min_value() const;
  // Value at the node closest to (x, p).
  double nearest(double x_value, double p_value) const;
};

// Characteristic function sampled on the square lattice mu = u + i v with
// u, v on Axis::centered(n, step). values[iu * n + iv].
struct CartesianCharFn {
  std::size_t n = 0;
  double step = 0.0;
  std::vector<cplx> values;
  // Only nodes with |mu| <= aperture whose mirror -mu is also a node enter the transform.
  double aperture = 0.0;

  Axis axis() const { return Axis::centered(n, step); }
  cplx mu(std::size_t iu, std::size_t iv) const;
  bool in_aperture(std::size_t iu, std::size_t iv) const;

  // Validates that (mu, c) pairs fill a uniform centered lattice; throws a
  // contract error otherwise. Missing lattice nodes are not allowed.
  static CartesianCharFn from_points(std::span<const cplx> mu, std::span<const cplx> c, double aperture);
};

inline constexpr double kBoundaryDecay = 1e-6;

// Direct separable DFT of the characteristic function onto the (x, p) grid.
// Adds a warning when |C| on the aperture rim exceeds kBoundaryDecay.
WignerGrid wigner_transform(const CartesianCharFn& cf, const Axis& x, const Axis& p);

// Wigner function of a single-mode density matrix via the Fock-basis
// Laguerre recurrence; no characteristic function involved.
WignerGrid wigner_fock(const CMatrix& rho, const Axis& x, const Axis& p);

double max_abs_diff(const WignerGrid& a, const WignerGrid& b);
// ∫ max(-W, 0) d^2alpha
double negativity_volume(const WignerGrid& w);
// Variance of the |W|-weighted projection of alpha onto exp(i angle).
double support_spread(const WignerGrid& w, double angle);

}  // namespace mechtomo::phase
