#include "mechtomo/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "mechtomo/error.hpp"
#include "mechtomo/parallel.hpp"
#include "mechtomo/simd/kernels.hpp"

namespace mechtomo::phase {
namespace {

constexpr const char* kModule = "tomography";

[[noreturn]] void fail(ErrorKind kind, const std::string& message) {
  throw ContractError(kind, kModule, message);
}

void require_axis(const Axis& a, const char* name) {
  if (a.count == 0 || !(a.step > 0.0) || !std::isfinite(a.min)) {
    fail(ErrorKind::contract, std::string(name) + " axis needs count > 0 and step > 0");
  }
}

// 1/sqrt(2): alpha = (x + i p) / sqrt(2)
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

}  // namespace

Axis Axis::centered(std::size_t count, double step) {
  return Axis{-static_cast<double>(count / 2) * step, step, count};
}

Axis Axis::linspace(double lo, double hi, std::size_t count) {
  if (count < 2 || !(hi > lo)) fail(ErrorKind::contract, "linspace needs count >= 2 and hi > lo");
  return Axis{lo, (hi - lo) / static_cast<double>(count - 1), count};
}

double WignerGrid::integral() const {
  double sum = 0.0;
  for (double w : values) sum += w;
  return sum * x.step * p.step * 0.5;
}

double WignerGrid::min_value() const { return *std::min_element(values.begin(), values.end()); }

double WignerGrid::nearest(double x_value, double p_value) const {
  auto index = [](const Axis& a, double v) {
    const double k = std::round((v - a.min) / a.step);
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(a.count - 1)));
  };
  return at(index(x, x_value), index(p, p_value));
}

cplx CartesianCharFn::mu(std::size_t iu, std::size_t iv) const {
  const Axis a = axis();
  return {a.at(iu), a.at(iv)};
}

bool CartesianCharFn::in_aperture(std::size_t iu, std::size_t iv) const {
  // With an even node count the first node has no mirror.
  if (n % 2 == 0 && (iu == 0 || iv == 0)) return false;
  return std::abs(mu(iu, iv)) <= aperture * (1.0 + 1e-12);
}

CartesianCharFn CartesianCharFn::from_points(std::span<const cplx> mu, std::span<const cplx> c, double aperture) {
  if (mu.size() != c.size() || mu.empty()) fail(ErrorKind::contract, "mu and C sample counts differ or are empty");
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(mu.size()))));
  if (n * n != mu.size() || n < 2) fail(ErrorKind::contract, "characteristic-function grid is not square");

  std::vector<double> u;
  u.reserve(mu.size());
  for (const cplx& m : mu) u.push_back(m.real());
  std::sort(u.begin(), u.end());
  const double step = (u.back() - u.front()) / static_cast<double>(n - 1);
  if (!(step > 0.0)) fail(ErrorKind::contract, "characteristic-function grid has zero extent");

  CartesianCharFn out;
  out.n = n;
  out.step = step;
  out.aperture = aperture;
  out.values.assign(n * n, cplx(0.0));
  std::vector<bool> seen(n * n, false);
  const double offset = static_cast<double>(n / 2);
  auto lattice_index = [&](double coord) -> std::size_t {
    const double k = coord / step + offset;
    const double kr = std::round(k);
    if (std::abs(k - kr) > 1e-6 || kr < 0.0 || kr >= static_cast<double>(n)) {
      fail(ErrorKind::contract, "characteristic-function grid is not a uniform centered lattice");
    }
    return static_cast<std::size_t>(kr);
  };
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const std::size_t slot = lattice_index(mu[i].real()) * n + lattice_index(mu[i].imag());
    if (seen[slot]) fail(ErrorKind::contract, "characteristic-function grid has a repeated node");
    seen[slot] = true;
    out.values[slot] = c[i];
  }
  return out;
}

WignerGrid wigner_transform(const CartesianCharFn& cf, const Axis& x, const Axis& p) {
  require_axis(x, "x");
  require_axis(p, "p");
  if (cf.n < 2 || !(cf.step > 0.0) || cf.values.size() != cf.n * cf.n) {
    fail(ErrorKind::contract, "characteristic-function grid is not uniform");
  }
  const std::size_t n = cf.n;
  const Axis mu_axis = cf.axis();

  // Ct(iv, iu) = C(u_iu + i v_iv) inside the aperture.
  CMatrix ct = CMatrix::Zero(n, n);
  double rim = 0.0;
  for (std::size_t iu = 0; iu < n; ++iu) {
    for (std::size_t iv = 0; iv < n; ++iv) {
      if (!cf.in_aperture(iu, iv)) continue;
      const cplx value = cf.values[iu * n + iv];
      ct(iv, iu) = value;
      auto inside = [&](std::size_t i, std::size_t j, int di, int dj) {
        if ((di < 0 && i == 0) || (dj < 0 && j == 0) || (di > 0 && i + 1 >= n) || (dj > 0 && j + 1 >= n)) return false;
        return cf.in_aperture(i + di, j + dj);
      };
      const bool edge = !inside(iu, iv, 1, 0) || !inside(iu, iv, -1, 0) || !inside(iu, iv, 0, 1) || !inside(iu, iv, 0, -1);
      if (edge) rim = std::max(rim, std::abs(value));
    }
  }

  // exp(mu* alpha - mu alpha*) = exp(2i (u p - v x)/sqrt(2))
  CMatrix fx(n, x.count);
  for (std::size_t a = 0; a < x.count; ++a) {
    for (std::size_t k = 0; k < n; ++k) fx(k, a) = std::polar(1.0, -2.0 * kInvSqrt2 * mu_axis.at(k) * x.at(a));
  }
  CMatrix fp(n, p.count);
  for (std::size_t b = 0; b < p.count; ++b) {
    for (std::size_t k = 0; k < n; ++k) fp(k, b) = std::polar(1.0, 2.0 * kInvSqrt2 * mu_axis.at(k) * p.at(b));
  }

  const auto& kern = simd::kernels();
  CMatrix t(n, x.count);  // t(iu, a) = sum_iv C(iu, iv) fx(iv, a)
  parallel_for(x.count, [&](std::size_t a) {
    for (std::size_t iu = 0; iu < n; ++iu) t(iu, a) = kern.dotu(ct.col(iu).data(), fx.col(a).data(), n);
  });

  WignerGrid w;
  w.x = x;
  w.p = p;
  w.values.assign(x.count * p.count, 0.0);
  std::vector<double> imag(x.count, 0.0);
  const double scale = cf.step * cf.step / (pi * pi);
  parallel_for(x.count, [&](std::size_t a) {
    for (std::size_t b = 0; b < p.count; ++b) {
      const cplx v = scale * kern.dotu(t.col(a).data(), fp.col(b).data(), n);
      w.values[a * p.count + b] = v.real();
      imag[a] = std::max(imag[a], std::abs(v.imag()));
    }
  });
  w.imag_residue = *std::max_element(imag.begin(), imag.end());
  if (rim > kBoundaryDecay) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "characteristic function reaches %.3g on the aperture rim (> %.0e); expect truncation ripple",
                  rim, kBoundaryDecay);
    w.warnings.emplace_back(buf);
  }
  return w;
}

WignerGrid wigner_fock(const CMatrix& rho, const Axis& x, const Axis& p) {
  require_axis(x, "x");
  require_axis(p, "p");
  if (rho.rows() != rho.cols() || rho.rows() == 0) fail(ErrorKind::invalid_dimension, "density matrix must be square");

  // Drop empty tail levels; for a positive matrix |rho_mn|^2 <= rho_mm rho_nn.
  std::size_t dim = static_cast<std::size_t>(rho.rows());
  while (dim > 1 && std::abs(rho(dim - 1, dim - 1)) < 1e-30) --dim;

  WignerGrid w;
  w.x = x;
  w.p = p;
  const std::size_t total = x.count * p.count;
  w.values.assign(total, 0.0);

  // W(alpha) = 2/pi sum_L sum_m Re[(2 - delta_L0) rho_{m,m+L} v_m^L(alpha)] with
  //   v_m^L = (-1)^m sqrt(m!/(m+L)!) (2 alpha)^L e^{-2|alpha|^2} L_m^(L)(4|alpha|^2),
  // |v_m^L| <= 1. The forward recurrence in m runs on the normalized values, so
  // nothing overflows for large |alpha| or m.
  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (total + kChunk - 1) / kChunk;
  const auto& kern = simd::kernels();

  parallel_for(chunks, [&](std::size_t chunk) {
    const std::size_t begin = chunk * kChunk;
    const std::size_t len = std::min(kChunk, total - begin);
    std::vector<double> four_norm(len), log_two_abs(len), arg(len), acc(len, 0.0);
    std::vector<double> minus_two_norm(len);
    std::vector<cplx> buf0(len), buf1(len), buf2(len);
    for (std::size_t k = 0; k < len; ++k) {
      const std::size_t idx = begin + k;
      const cplx alpha = cplx(x.at(idx / p.count), p.at(idx % p.count)) * kInvSqrt2;
      const double r = std::abs(alpha);
      four_norm[k] = 4.0 * r * r;
      minus_two_norm[k] = -2.0 * r * r;
      log_two_abs[k] = r > 0.0 ? std::log(2.0 * r) : -std::numeric_limits<double>::infinity();
      arg[k] = std::arg(alpha);
    }
    for (std::size_t diag = 0; diag < dim; ++diag) {
      const double l = static_cast<double>(diag);
      const double log_norm = 0.5 * std::lgamma(l + 1.0);
      cplx* prev = buf0.data();
      cplx* cur = buf1.data();
      cplx* next = buf2.data();
      for (std::size_t k = 0; k < len; ++k) {
        if (diag == 0) {
          cur[k] = std::exp(minus_two_norm[k]);
        } else if (std::isinf(log_two_abs[k])) {
          cur[k] = 0.0;
        } else {
          cur[k] = std::polar(std::exp(l * log_two_abs[k] + minus_two_norm[k] - log_norm), l * arg[k]);
        }
        prev[k] = 0.0;
      }
      const double weight = diag == 0 ? 1.0 : 2.0;
      for (std::size_t m = 0; m + diag < dim; ++m) {
        kern.accumulate_real(weight * rho(m, m + diag), cur, acc.data(), len);
        if (m + diag + 1 == dim) break;
        const double md = static_cast<double>(m);
        kern.laguerre_step(four_norm.data(), 2.0 * md + 1.0 + l, cur, std::sqrt(md * (md + l)), prev,
                           1.0 / std::sqrt((md + 1.0) * (md + 1.0 + l)), next, len);
        std::swap(prev, cur);
        std::swap(cur, next);
      }
    }
    for (std::size_t k = 0; k < len; ++k) w.values[begin + k] = 2.0 / pi * acc[k];
  });
  return w;
}

double max_abs_diff(const WignerGrid& a, const WignerGrid& b) {
  if (!(a.x == b.x) || !(a.p == b.p)) fail(ErrorKind::contract, "Wigner grids have different axes");
  double d = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

double negativity_volume(const WignerGrid& w) {
  double sum = 0.0;
  for (double v : w.values) sum += std::max(-v, 0.0);
  return sum * w.x.step * w.p.step * 0.5;
}

double support_spread(const WignerGrid& w, double angle) {
  const double cu = std::cos(angle);
  const double su = std::sin(angle);
  double mass = 0.0, first = 0.0, second = 0.0;
  for (std::size_t ix = 0; ix < w.x.count; ++ix) {
    for (std::size_t ip = 0; ip < w.p.count; ++ip) {
      const double weight = std::abs(w.at(ix, ip));
      const double proj = kInvSqrt2 * (w.x.at(ix) * cu + w.p.at(ip) * su);
      mass += weight;
      first += weight * proj;
      second += weight * proj * proj;
    }
  }
  if (mass == 0.0) return 0.0;
  const double mean = first / mass;
  return second / mass - mean * mean;
}

}  // namespace mechtomo::phase
