#include "mechtomo/tomography.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <tuple>

#include <Eigen/SVD>

#include "mechtomo/error.hpp"
#include "mechtomo/parallel.hpp"
#include "mechtomo/simd/kernels.hpp"

namespace mechtomo::tomo {
namespace {

constexpr const char* kModule = "tomography";

[[noreturn]] void fail(ErrorKind kind, const std::string& message) {
  throw ContractError(kind, kModule, message);
}

std::string format_mu(cplx mu) {
  std::ostringstream os;
  os.precision(6);
  os << mu.real() << (mu.imag() < 0 ? "-" : "+") << std::abs(mu.imag()) << "i";
  return os.str();
}

// Transposed density matrix restricted to its occupied Fock levels. The
// displacement recurrence for rows and columns < k never looks past k, so the
// trimmed trace is exact.
struct Prepared {
  std::size_t dim = 0;
  std::size_t support = 0;
  CMatrix rho_t;
};

Prepared prepare(const fock::QuantumState& rho) {
  if (rho.space().has_atom() || rho.space().mode_dims().size() != 1) {
    fail(ErrorKind::invalid_dimension, "characteristic function needs a single-mode state");
  }
  Prepared p;
  p.dim = rho.dim();
  const CMatrix r = rho.density();
  std::size_t k = p.dim;
  while (k > 1 && std::abs(r(k - 1, k - 1)) < 1e-30) --k;
  p.support = k;
  p.rho_t = r.topLeftCorner(k, k).transpose();
  return p;
}

cplx evaluate(const Prepared& p, cplx mu) {
  const CMatrix d = fock::displacement_elements(std::max<std::size_t>(p.support, 2), mu);
  const auto& kern = simd::kernels();
  const std::size_t k = p.support;
  cplx sum = 0.0;
  for (std::size_t n = 0; n < k; ++n) sum += kern.dotu(p.rho_t.col(n).data(), d.col(n).data(), k);
  return sum;
}

std::vector<cplx> evaluate_many(const fock::QuantumState& rho, std::span<const cplx> mu) {
  const Prepared p = prepare(rho);
  double largest = 0.0;
  for (const cplx& m : mu) largest = std::max(largest, std::abs(m));
  fock::check_truncation(p.dim, largest, kModule);
  std::vector<cplx> out(mu.size());
  parallel_for(mu.size(), [&](std::size_t i) { out[i] = evaluate(p, mu[i]); });
  return out;
}

void require_positive(double x, const char* what) {
  if (!std::isfinite(x) || !(x > 0.0)) fail(ErrorKind::contract, std::string(what) + " must be > 0");
}

}  // namespace

ProbePoint ProbePoint::make(double g, double tau, double phi, double intensity) {
  if (!std::isfinite(intensity) || intensity < 0.0) fail(ErrorKind::invalid_intensity, "intensity must be >= 0");
  if (!std::isfinite(g) || !std::isfinite(tau) || !std::isfinite(phi)) fail(ErrorKind::contract, "probe point not finite");
  ProbePoint p;
  p.g = g;
  p.tau = tau;
  p.phi = phi;
  p.intensity = intensity;
  p.theta = 2.0 * g * tau * std::sqrt(intensity);
  p.mu = I_unit * g * tau * std::polar(1.0, phi);
  return p;
}

cplx PolarLayout::site(std::size_t index) const {
  if (index == 0) return 0.0;
  const std::size_t j = (index - 1) / angles + 1;
  const std::size_t k = (index - 1) % angles;
  return std::polar(static_cast<double>(j) * mu_max / static_cast<double>(radii),
                    2.0 * pi * static_cast<double>(k) / static_cast<double>(angles));
}

cplx char_fn(const fock::QuantumState& rho, cplx mu) {
  const std::array<cplx, 1> one{mu};
  return evaluate_many(rho, one)[0];
}

std::vector<cplx> char_fn(const fock::QuantumState& rho, std::span<const cplx> mu) { return evaluate_many(rho, mu); }

CharFnGrid char_fn_grid(const fock::QuantumState& rho, std::span<const cplx> mu) {
  CharFnGrid grid;
  grid.mu.assign(mu.begin(), mu.end());
  grid.c = evaluate_many(rho, mu);
  grid.condition.assign(mu.size(), 1.0);
  grid.source = CharFnSource::direct;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] == cplx(0.0)) grid.origin_deviation = std::abs(grid.c[i] - 1.0);
  }
  return grid;
}

double pe_from_charfn(cplx c, const dynamics::AtomMixture& am, double theta) {
  return 0.5 + 0.5 * am.inversion() * (std::polar(1.0, theta) * c).real();
}

PeApprox pe_approx(const fock::QuantumState& rho_c, const dynamics::AtomMixture& am, double g, double tau, double intensity,
                   double phi, std::optional<double> theta_override) {
  if (!std::isfinite(intensity) || !(intensity > 0.0)) fail(ErrorKind::invalid_intensity, "intensity must be > 0");
  am.validate();
  const ProbePoint point = ProbePoint::make(g, tau, phi, intensity);
  const double theta = theta_override.value_or(point.theta);
  const double raw = pe_from_charfn(char_fn(rho_c, point.mu), am, theta);
  PeApprox out;
  out.p_e = std::clamp(raw, 0.0, 1.0);
  out.clamped_by = std::abs(raw - out.p_e);
  out.large_i_warning = intensity < 25.0 * (fock::mean_number(rho_c) + 1.0);
  return out;
}

std::size_t ProbeGrid::point_count() const {
  std::size_t n = 0;
  for (const auto& s : sites) n += s.points.size();
  return n;
}

ProbeGrid probe_grid(const ProbeGridSpec& spec, double g) {
  require_positive(g, "g");
  require_positive(spec.mu_max, "mu_max");
  if (spec.radii == 0 || spec.angles == 0) fail(ErrorKind::contract, "probe grid needs radii >= 1 and angles >= 1");
  if (!std::isfinite(spec.base_intensity) || !(spec.base_intensity > 0.0)) {
    fail(ErrorKind::invalid_intensity, "base intensity must be > 0");
  }
  fock::check_truncation(spec.dim, spec.mu_max, kModule);

  ProbeGrid grid;
  grid.g = g;
  grid.layout = PolarLayout{spec.mu_max, spec.radii, spec.angles};
  grid.sites.reserve(grid.layout.site_count());
  const double root_base = std::sqrt(spec.base_intensity);
  for (std::size_t i = 0; i < grid.layout.site_count(); ++i) {
    ProbeSite site;
    site.mu = grid.layout.site(i);
    if (i == 0) {
      site.points.push_back(ProbePoint::make(g, 0.0, 0.0, spec.base_intensity));
    } else {
      const double r = std::abs(site.mu);
      const double tau = r / g;
      const double phi = std::arg(site.mu) - pi / 2.0;
      const double root_second = root_base + 3.0 * pi / (4.0 * r);
      site.points.push_back(ProbePoint::make(g, tau, phi, spec.base_intensity));
      site.points.push_back(ProbePoint::make(g, tau, phi, root_second * root_second));
    }
    grid.sites.push_back(std::move(site));
  }
  return grid;
}

std::vector<ProbeRecord> synthesize_records(const fock::QuantumState& rho_c, const dynamics::AtomMixture& am,
                                            const ProbeGrid& grid, const SynthesisOptions& options) {
  am.validate();
  if (options.shots && *options.shots == 0) fail(ErrorKind::contract, "shots must be positive");

  std::vector<ProbeRecord> records;
  records.reserve(grid.point_count());
  for (const auto& site : grid.sites) {
    for (const auto& point : site.points) {
      ProbeRecord r;
      r.point = point;
      r.atom = am;
      records.push_back(r);
    }
  }

  if (options.mode == SynthesisMode::closed_form) {
    std::vector<cplx> mus;
    mus.reserve(grid.sites.size());
    for (const auto& site : grid.sites) mus.push_back(site.points.front().mu);
    const std::vector<cplx> c = evaluate_many(rho_c, mus);
    std::size_t at = 0;
    for (std::size_t s = 0; s < grid.sites.size(); ++s) {
      for (std::size_t k = 0; k < grid.sites[s].points.size(); ++k, ++at) {
        const double raw = pe_from_charfn(c[s], am, records[at].point.theta);
        records[at].p_e = std::clamp(raw, 0.0, 1.0);
      }
    }
  } else {
    for (const auto& r : records) {
      if (dynamics::photon_truncation(r.point.intensity) > options.max_photon_dim) {
        fail(ErrorKind::truncation_too_small, "exact synthesis infeasible: photon truncation for I = " +
                                                  std::to_string(r.point.intensity) + " exceeds " +
                                                  std::to_string(options.max_photon_dim));
      }
    }
    const auto cs = dynamics::CouplingSet::matched_at(grid.g);
    parallel_for(records.size(), [&](std::size_t i) {
      const ProbePoint& pt = records[i].point;
      const std::array<double, 1> taus{pt.tau};
      records[i].p_e = dynamics::pe_two_mode(rho_c, am, cs, pt.intensity, pt.phi, taus)[0];
    });
  }

  if (options.shots) {
    std::mt19937_64 rng(options.seed);
    for (auto& r : records) {
      std::binomial_distribution<std::uint64_t> draw(*options.shots, r.p_e);
      r.shots = options.shots;
      r.p_e_sampled = static_cast<double>(draw(rng)) / static_cast<double>(*options.shots);
    }
  }
  return records;
}

CharFnGrid extract_char_fn(std::span<const ProbeRecord> records) {
  using Key = std::tuple<double, double, double>;
  std::map<Key, std::size_t> slot;
  std::vector<std::vector<const ProbeRecord*>> groups;
  for (const auto& r : records) {
    const Key key{r.point.g, r.point.tau, r.point.phi};
    auto [it, inserted] = slot.emplace(key, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(&r);
  }

  CharFnGrid out;
  out.source = CharFnSource::reconstructed;
  out.mu.reserve(groups.size());
  std::vector<cplx> offending;
  for (const auto& group : groups) {
    const cplx mu = group.front()->point.mu;
    const auto rows = static_cast<Eigen::Index>(group.size());
    Eigen::MatrixXd a(rows, 2);
    Eigen::VectorXd b(rows);
    double signal = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const ProbeRecord& r = *group[i];
      const double half_inv = 0.5 * r.atom.inversion();
      signal = std::max(signal, std::abs(half_inv));
      a(i, 0) = half_inv * std::cos(r.point.theta);
      a(i, 1) = -half_inv * std::sin(r.point.theta);
      b(i) = r.observed() - 0.5;
    }
    if (signal < 1e-12) fail(ErrorKind::unobservable, "signal prefactor vanishes: rho_e == rho_g");

    cplx c;
    double condition = 1.0;
    if (group.front()->point.tau == 0.0) {
      // theta = 0 at the origin: only Re C is measured, and C(0) = Tr rho is real.
      c = a.col(0).dot(b) / a.col(0).squaredNorm();
    } else {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const auto& s = svd.singularValues();
      condition = s(1) > 0.0 ? s(0) / s(1) : std::numeric_limits<double>::infinity();
      if (condition > kMaxCondition) {
        offending.push_back(mu);
        continue;
      }
      const Eigen::VectorXd x = svd.solve(b);
      c = cplx(x(0), x(1));
    }
    if (mu == cplx(0.0)) out.origin_deviation = std::abs(c - 1.0);
    out.mu.push_back(mu);
    out.c.push_back(c);
    out.condition.push_back(condition);
  }
  if (!offending.empty()) {
    std::string list;
    for (std::size_t i = 0; i < std::min<std::size_t>(offending.size(), 5); ++i) {
      list += (i ? ", " : "") + format_mu(offending[i]);
    }
    if (offending.size() > 5) list += ", ... (" + std::to_string(offending.size()) + " points)";
    fail(ErrorKind::ill_conditioned, "condition number above 1e3 at mu = " + list);
  }
  return out;
}

phase::CartesianCharFn resample_polar(const CharFnGrid& grid, const PolarLayout& layout, std::size_t n, double step) {
  if (layout.radii == 0 || layout.angles == 0 || !(layout.mu_max > 0.0)) fail(ErrorKind::contract, "bad polar layout");
  if (grid.mu.size() != layout.site_count()) {
    fail(ErrorKind::contract, "characteristic-function grid does not match the polar layout");
  }
  const double tol = 1e-9 * (1.0 + layout.mu_max);
  for (std::size_t i = 0; i < grid.mu.size(); ++i) {
    if (std::abs(grid.mu[i] - layout.site(i)) > tol) {
      fail(ErrorKind::contract, "characteristic-function sample " + std::to_string(i) + " is off the polar layout");
    }
  }
  if (n < 2 || !(step > 0.0)) fail(ErrorKind::contract, "cartesian lattice needs n >= 2 and step > 0");

  const double dr = layout.mu_max / static_cast<double>(layout.radii);
  const double dpsi = 2.0 * pi / static_cast<double>(layout.angles);
  auto value = [&](std::size_t j, std::size_t k) -> cplx {
    return j == 0 ? grid.c[0] : grid.c[1 + (j - 1) * layout.angles + k];
  };

  phase::CartesianCharFn cf;
  cf.n = n;
  cf.step = step;
  cf.aperture = layout.mu_max;
  cf.values.assign(n * n, cplx(0.0));
  for (std::size_t iu = 0; iu < n; ++iu) {
    for (std::size_t iv = 0; iv < n; ++iv) {
      const cplx mu = cf.mu(iu, iv);
      const double r = std::abs(mu);
      if (r > layout.mu_max * (1.0 + 1e-12)) continue;
      const double s = std::min(r / dr, static_cast<double>(layout.radii));
      const std::size_t j0 = std::min(static_cast<std::size_t>(s), layout.radii - 1);
      const double t = s - static_cast<double>(j0);
      double psi = std::arg(mu);
      if (psi < 0.0) psi += 2.0 * pi;
      const double q = psi / dpsi;
      const double qf = std::floor(q);
      const double u = q - qf;
      const std::size_t k0 = static_cast<std::size_t>(qf) % layout.angles;
      const std::size_t k1 = (k0 + 1) % layout.angles;
      const cplx inner = (1.0 - u) * value(j0, k0) + u * value(j0, k1);
      const cplx outer = (1.0 - u) * value(j0 + 1, k0) + u * value(j0 + 1, k1);
      cf.values[iu * n + iv] = (1.0 - t) * inner + t * outer;
    }
  }
  return cf;
}

phase::WignerGrid wigner_from_charfn(const phase::CartesianCharFn& cf, const TransformSpec& spec) {
  return phase::wigner_transform(cf, spec.x, spec.p);
}

phase::WignerGrid wigner_direct(const fock::QuantumState& rho, const TransformSpec& spec) {
  phase::CartesianCharFn cf;
  cf.n = spec.mu_nodes;
  cf.step = spec.mu_step;
  cf.aperture = spec.aperture;
  if (cf.n < 2 || !(cf.step > 0.0)) fail(ErrorKind::contract, "cartesian lattice needs n >= 2 and step > 0");
  cf.values.assign(cf.n * cf.n, cplx(0.0));
  std::vector<cplx> mus;
  std::vector<std::size_t> where;
  for (std::size_t iu = 0; iu < cf.n; ++iu) {
    for (std::size_t iv = 0; iv < cf.n; ++iv) {
      if (!cf.in_aperture(iu, iv)) continue;
      mus.push_back(cf.mu(iu, iv));
      where.push_back(iu * cf.n + iv);
    }
  }
  const std::vector<cplx> c = evaluate_many(rho, mus);
  for (std::size_t i = 0; i < c.size(); ++i) cf.values[where[i]] = c[i];
  return phase::wigner_transform(cf, spec.x, spec.p);
}

phase::WignerGrid reconstruct_wigner(std::span<const ProbeRecord> records, const PolarLayout& layout,
                                     const TransformSpec& spec, CharFnGrid* extracted) {
  CharFnGrid grid = extract_char_fn(records);
  phase::CartesianCharFn cf = resample_polar(grid, layout, spec.mu_nodes, spec.mu_step);
  cf.aperture = std::min(cf.aperture, spec.aperture);
  if (extracted) *extracted = std::move(grid);
  return phase::wigner_transform(cf, spec.x, spec.p);
}

}  // namespace mechtomo::tomo
