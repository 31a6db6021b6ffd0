#pragma once
// Characteristic-function tomography of the cantilever mode.
//
// A probe of duration tau with Raman phase phi and photon number I measures
//   P_e = 1/2 + 1/2 (rho_e - rho_g) Re[e^{i theta} C(mu)],
//   theta = 2 g tau sqrt(I),  mu = i g tau e^{i phi}.
// Each mu != 0 is probed at two intensities whose theta differ by pi/2, which
// fixes Re C and Im C separately.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mechtomo/dynamics.hpp"
#include "mechtomo/fockspace.hpp"
#include "mechtomo/phasespace.hpp"

namespace mechtomo::tomo {

struct ProbePoint {
  double g = 0.0;          // rad/s
  double tau = 0.0;        // s
  double phi = 0.0;        // rad
  double intensity = 0.0;  // mean photon number I
  double theta = 0.0;      // 2 g tau sqrt(I)
  cplx mu;                 // i g tau e^{i phi}

  // Throws invalid_intensity for I < 0.
  static ProbePoint make(double g, double tau, double phi, double intensity);
};

struct ProbeRecord {
  ProbePoint point;
  dynamics::AtomMixture atom;
  double p_e = 0.0;
  std::optional<std::uint64_t> shots;
  std::optional<double> p_e_sampled;  // present iff shots is

  double observed() const { return p_e_sampled ? *p_e_sampled : p_e; }
};

// Polar raster: the origin, then radii j = 1..radii (r_j = j mu_max / radii)
// each with angles k = 0..angles-1 (psi_k = 2 pi k / angles).
struct PolarLayout {
  double mu_max = 0.0;
  std::size_t radii = 0;
  std::size_t angles = 0;

  std::size_t site_count() const { return 1 + radii * angles; }
  cplx site(std::size_t index) const;
};

enum class CharFnSource { direct, reconstructed };

struct CharFnGrid {
  std::vector<cplx> mu;
  std::vector<cplx> c;
  std::vector<double> condition;  // 2-norm condition number of each solve; 1 for direct values
  CharFnSource source = CharFnSource::direct;
  double origin_deviation = 0.0;  // |C(0) - 1| when mu = 0 is present; never rescaled
};

// Tr(rho D(mu)). Throws truncation_too_small when mu violates the guard for rho's dimension.
cplx char_fn(const fock::QuantumState& rho, cplx mu);
std::vector<cplx> char_fn(const fock::QuantumState& rho, std::span<const cplx> mu);
CharFnGrid char_fn_grid(const fock::QuantumState& rho, std::span<const cplx> mu);

struct PeApprox {
  double p_e = 0.0;
  double clamped_by = 0.0;        // |raw - p_e|
  bool large_i_warning = false;   // I < 25 (<n_c> + 1)
};

double pe_from_charfn(cplx c, const dynamics::AtomMixture& am, double theta);

// Throws invalid_intensity for I <= 0. theta_override replaces 2 g tau sqrt(I).
PeApprox pe_approx(const fock::QuantumState& rho_c, const dynamics::AtomMixture& am, double g, double tau, double intensity,
                   double phi, std::optional<double> theta_override = std::nullopt);

struct ProbeGridSpec {
  double mu_max = 5.4;
  std::size_t radii = 200;
  std::size_t angles = 512;
  double base_intensity = 400.0;
  std::size_t dim = 64;  // cantilever truncation the grid must respect
};

struct ProbeSite {
  cplx mu;
  std::vector<ProbePoint> points;  // one at the origin, two (theta pi/2 apart) elsewhere
};

struct ProbeGrid {
  double g = 0.0;
  PolarLayout layout;
  std::vector<ProbeSite> sites;  // layout order

  std::size_t point_count() const;
};

// tau = |mu| / g, phi = arg(mu) - pi/2, I_1 = base, I_2 = (sqrt(base) + 3 pi / (4 |mu|))^2.
ProbeGrid probe_grid(const ProbeGridSpec& spec, double g);

enum class SynthesisMode { closed_form, exact };

struct SynthesisOptions {
  SynthesisMode mode = SynthesisMode::closed_form;
  std::optional<std::uint64_t> shots;
  std::uint64_t seed = 0;
  std::size_t max_photon_dim = 2048;  // exact mode refuses larger photon truncations
};

// Records in grid order. Sampling draws from one mt19937_64 seeded with options.seed.
std::vector<ProbeRecord> synthesize_records(const fock::QuantumState& rho_c, const dynamics::AtomMixture& am,
                                            const ProbeGrid& grid, const SynthesisOptions& options = {});

inline constexpr double kMaxCondition = 1e3;

// Groups records by (tau, phi) in first-appearance order and solves each
// group in the least-squares sense.
CharFnGrid extract_char_fn(std::span<const ProbeRecord> records);

// Bilinear interpolation in (|mu|, arg mu) of polar-raster values onto the
// centered cartesian lattice. Nodes outside mu_max are zero.
phase::CartesianCharFn resample_polar(const CharFnGrid& grid, const PolarLayout& layout, std::size_t n, double step);

struct TransformSpec {
  std::size_t mu_nodes = 109;  // odd: every node has its mirror
  double mu_step = 0.1;
  double aperture = 5.4;
  phase::Axis x = phase::Axis::centered(64, 0.1875);
  phase::Axis p = phase::Axis::centered(64, 0.1875);
};

phase::WignerGrid wigner_from_charfn(const phase::CartesianCharFn& cf, const TransformSpec& spec);
// Dense char_fn on the cartesian lattice followed by the same transform.
phase::WignerGrid wigner_direct(const fock::QuantumState& rho, const TransformSpec& spec);

// Records -> C -> polar resampling -> W.
phase::WignerGrid reconstruct_wigner(std::span<const ProbeRecord> records, const PolarLayout& layout,
                                     const TransformSpec& spec, CharFnGrid* extracted = nullptr);

}  // namespace mechtomo::tomo
