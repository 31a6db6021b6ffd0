#include <gtest/gtest.h>

#include <boost/math/special_functions/laguerre.hpp>
#include <cmath>
#include <random>

#include "mechtomo/tomography.hpp"
#include "support.hpp"

namespace mechtomo::tomo {
namespace {

using dynamics::AtomMixture;
using fock::QuantumState;

TEST(CharFn, Examples) {
  std::mt19937_64 rng(41);
  EXPECT_NEAR(std::abs(char_fn(testing::random_mixed(16, 10, 3, rng), 0.0) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(char_fn(fock::make_state(16, fock::Fock{0}), 1.0) - 0.606530659712633424), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(char_fn(fock::make_state(16, fock::Fock{1}), std::polar(1.0, 0.7))), 0.0, 1e-14);
  EXPECT_CONTRACT(char_fn(fock::make_state(8, fock::Fock{0}), 2.0), ErrorKind::truncation_too_small);
}

TEST(CharFn, AnalyticForms) {
  const std::size_t d = 64;
  const cplx alpha(0.6, -0.8);
  const double nbar = 0.7;
  const auto vac = fock::make_state(d, fock::Fock{0});
  const auto coh = fock::make_state(d, fock::Coherent{alpha});
  const auto f3 = fock::make_state(d, fock::Fock{3});
  const auto th = fock::make_state(d, fock::Thermal{nbar});
  for (double r : {0.0, 0.5, 1.7, 3.0})
    for (double a : {0.0, 1.1, 2.9}) {
      const cplx mu = std::polar(r, a);
      const double m2 = r * r;
      EXPECT_NEAR(std::abs(char_fn(vac, mu) - std::exp(-m2 / 2)), 0.0, 1e-10);
      EXPECT_NEAR(std::abs(char_fn(coh, mu) - std::exp(-m2 / 2 + mu * std::conj(alpha) - std::conj(mu) * alpha)), 0.0,
                  1e-10);
      EXPECT_NEAR(std::abs(char_fn(f3, mu) - std::exp(-m2 / 2) * boost::math::laguerre(3, m2)), 0.0, 1e-10);
      // Bose-Einstein weights are renormalized over 64 levels; (0.7/1.7)^64 is far below 1e-10
      EXPECT_NEAR(std::abs(char_fn(th, mu) - std::exp(-(nbar + 0.5) * m2)), 0.0, 1e-10);
    }
}

TEST(CharFn, BoundAndHermitianSymmetry) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> r(0.0, 3.0), a(0.0, 2.0 * pi);
  for (int trial = 0; trial < 10; ++trial) {
    const QuantumState rho = testing::random_mixed(64, 12, 3, rng);
    const cplx mu = std::polar(r(rng), a(rng));
    const cplx c = char_fn(rho, mu);
    EXPECT_LE(std::abs(c), 1.0 + 1e-10);
    EXPECT_NEAR(std::abs(char_fn(rho, -mu) - std::conj(c)), 0.0, 1e-10);
  }
}

TEST(PeApprox, Examples) {
  const auto vac = fock::make_state(16, fock::Fock{0});
  EXPECT_EQ(pe_approx(vac, AtomMixture::ground(), 830.0, 0.0, 400.0, 0.0).p_e, 0.0);
  // mu = i g tau e^{i phi} real with |mu| = 1: phi = -pi/2
  const PeApprox a = pe_approx(vac, AtomMixture::ground(), 1.0, 1.0, 400.0, -pi / 2.0, 0.0);
  EXPECT_NEAR(a.p_e, 0.196734670143683288, 1e-14);
  EXPECT_FALSE(a.large_i_warning);
  EXPECT_TRUE(pe_approx(vac, AtomMixture::ground(), 1.0, 1.0, 20.0, 0.0).large_i_warning);
  EXPECT_CONTRACT(pe_approx(vac, AtomMixture::ground(), 1.0, 1.0, 0.0, 0.0), ErrorKind::invalid_intensity);
}

TEST(PeApprox, ConvergesTowardsExactWithIntensity) {
  const auto vac = fock::make_state(12, fock::Fock{0});
  const double g = 1.0, tau = 0.5;
  const double taus[] = {tau};
  auto error = [&](double intensity) {
    // c-number Raman drive: the regime the large-I formula describes
    const double exact = dynamics::pe_classical_drive(vac, AtomMixture::ground(),
                                                      dynamics::CouplingSet::matched_at(g), intensity, 0.0, taus)[0];
    return std::abs(pe_approx(vac, AtomMixture::ground(), g, tau, intensity, 0.0).p_e - exact);
  };
  EXPECT_LT(error(100.0), error(25.0));
  EXPECT_LT(error(400.0), error(100.0));
}

TEST(ProbePoint, MuInvariant) {
  const ProbePoint p = ProbePoint::make(830.0, 2e-3, 0.4, 100.0);
  EXPECT_NEAR(std::abs(p.mu - I_unit * 830.0 * 2e-3 * std::polar(1.0, 0.4)), 0.0, 1e-15);
  EXPECT_NEAR(p.theta, 2.0 * 830.0 * 2e-3 * 10.0, 1e-12);
  EXPECT_CONTRACT(ProbePoint::make(830.0, 1e-3, 0.0, -1.0), ErrorKind::invalid_intensity);
}

TEST(ProbeGrid, SmallSpec) {
  const double g = 830.0;
  const ProbeGrid grid = probe_grid({3.0, 2, 4, 400.0, 64}, g);
  ASSERT_EQ(grid.sites.size(), 9u);
  EXPECT_EQ(grid.point_count(), 17u);
  EXPECT_EQ(grid.sites[0].points.size(), 1u);
  for (const auto& site : grid.sites) {
    EXPECT_LE(std::abs(site.mu), 3.0 + 1e-12);
    for (const auto& p : site.points) {
      EXPECT_NEAR(std::abs(p.mu - I_unit * p.g * p.tau * std::polar(1.0, p.phi)), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(p.mu - site.mu), 0.0, 1e-12);  // (tau, phi, g) reproduce the grid mu
    }
    if (site.points.size() == 2) {
      const double d = std::remainder(site.points[0].theta - site.points[1].theta, 2.0 * pi);
      EXPECT_NEAR(std::abs(std::abs(d) - pi / 2.0), 0.0, 1e-9);
    }
  }
  EXPECT_CONTRACT(probe_grid({5.0, 2, 4, 400.0, 32}, g), ErrorKind::truncation_too_small);
}

TEST(Synthesis, ShotsAndDeterminism) {
  const auto vac = fock::make_state(32, fock::Fock{0});
  const ProbeGrid grid = probe_grid({2.0, 4, 8, 400.0, 32}, 830.0);
  const auto clean = synthesize_records(vac, AtomMixture::ground(), grid);
  for (const auto& r : clean) {
    EXPECT_FALSE(r.shots.has_value());
    EXPECT_FALSE(r.p_e_sampled.has_value());
  }
  SynthesisOptions opt;
  opt.shots = 1000;
  opt.seed = 5;
  const auto a = synthesize_records(vac, AtomMixture::ground(), grid, opt);
  const auto b = synthesize_records(vac, AtomMixture::ground(), grid, opt);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i].p_e_sampled, *b[i].p_e_sampled);
  opt.seed = 6;
  const auto c = synthesize_records(vac, AtomMixture::ground(), grid, opt);
  std::size_t differ = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differ += *a[i].p_e_sampled != *c[i].p_e_sampled;
  EXPECT_GT(differ, a.size() / 2);
}

TEST(Synthesis, BinomialConcentration) {
  const auto vac = fock::make_state(32, fock::Fock{0});
  const ProbeGrid grid = probe_grid({3.0, 10, 32, 400.0, 32}, 830.0);
  SynthesisOptions opt;
  opt.shots = 1000000;
  opt.seed = 7;
  const auto recs = synthesize_records(vac, AtomMixture::ground(), grid, opt);
  std::size_t inside = 0;
  for (const auto& r : recs) {
    const double sigma = std::sqrt(r.p_e * (1.0 - r.p_e) / 1e6);
    inside += std::abs(*r.p_e_sampled - r.p_e) <= 5.0 * sigma;
  }
  EXPECT_GE(static_cast<double>(inside), 0.99 * static_cast<double>(recs.size()));
}

TEST(Synthesis, ExactModeCloseToClosedForm) {
  const auto vac = fock::make_state(8, fock::Fock{0});
  const ProbeGrid grid = probe_grid({0.5, 1, 2, 400.0, 8}, 1.0);
  SynthesisOptions opt;
  opt.mode = SynthesisMode::exact;
  const auto exact = synthesize_records(vac, AtomMixture::ground(), grid, opt);
  const auto closed = synthesize_records(vac, AtomMixture::ground(), grid);
  for (std::size_t i = 0; i < exact.size(); ++i) EXPECT_NEAR(exact[i].p_e, closed[i].p_e, 0.12);
  opt.max_photon_dim = 100;
  EXPECT_CONTRACT(synthesize_records(vac, AtomMixture::ground(), grid, opt), ErrorKind::truncation_too_small);
}

TEST(Extract, VacuumExact) {
  const auto vac = fock::make_state(64, fock::Fock{0});
  const ProbeGrid grid = probe_grid({4.0, 20, 16, 400.0, 64}, 830.0);
  const auto recs = synthesize_records(vac, AtomMixture::ground(), grid);
  const CharFnGrid cf = extract_char_fn(recs);
  ASSERT_EQ(cf.mu.size(), grid.sites.size());
  EXPECT_EQ(cf.source, CharFnSource::reconstructed);
  EXPECT_LE(cf.origin_deviation, 1e-12);
  for (std::size_t i = 0; i < cf.mu.size(); ++i) {
    EXPECT_NEAR(std::abs(cf.c[i] - std::exp(-0.5 * std::norm(cf.mu[i]))), 0.0, 1e-10) << cf.mu[i];
    EXPECT_LE(cf.condition[i], kMaxCondition);
  }
}

TEST(Extract, HermitianSymmetryReconstructed) {
  const auto coh = fock::make_state(64, fock::Coherent{cplx(0.7, 0.4)});
  const ProbeGrid grid = probe_grid({3.0, 6, 8, 400.0, 64}, 830.0);
  const CharFnGrid cf = extract_char_fn(synthesize_records(coh, AtomMixture::with_excited(0.1), grid));
  // angle k and k + 4 are opposite on an 8-angle raster
  for (std::size_t j = 0; j < 6; ++j)
    for (std::size_t k = 0; k < 4; ++k) {
      const std::size_t a = 1 + j * 8 + k, b = a + 4;
      EXPECT_NEAR(std::abs(cf.mu[a] + cf.mu[b]), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(cf.c[a] - std::conj(cf.c[b])), 0.0, 1e-8);
    }
}

ProbeRecord manual(double tau, double theta, double p_e, const AtomMixture& am) {
  ProbeRecord r;
  r.point = ProbePoint::make(1.0, tau, 0.0, 1.0);
  r.point.theta = theta;
  r.atom = am;
  r.p_e = p_e;
  return r;
}

TEST(Extract, DecoupledThetaPair) {
  // theta = 0 fixes Re C, theta = pi/2 fixes Im C
  const auto am = AtomMixture::ground();
  const cplx c(0.3, -0.2);
  const std::vector<ProbeRecord> recs{manual(0.5, 0.0, 0.5 - 0.5 * c.real(), am),
                                      manual(0.5, pi / 2.0, 0.5 + 0.5 * c.imag(), am)};
  const CharFnGrid cf = extract_char_fn(recs);
  ASSERT_EQ(cf.c.size(), 1u);
  EXPECT_NEAR(std::abs(cf.c[0] - c), 0.0, 1e-14);
  EXPECT_NEAR(cf.condition[0], 1.0, 1e-12);
}

TEST(Extract, Errors) {
  const auto half = AtomMixture::with_excited(0.5);
  EXPECT_CONTRACT(extract_char_fn(std::vector<ProbeRecord>{manual(0.5, 0.0, 0.5, half), manual(0.5, 1.0, 0.5, half)}),
                  ErrorKind::unobservable);
  const auto am = AtomMixture::ground();
  try {
    extract_char_fn(std::vector<ProbeRecord>{manual(0.5, 0.3, 0.4, am), manual(0.5, 0.3 + 1e-5, 0.4, am)});
    ADD_FAILURE() << "expected ill-conditioned";
  } catch (const ContractError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ill_conditioned);
    EXPECT_NE(std::string(e.what()).find("mu = "), std::string::npos);
  }
}

TEST(ResampleAndTransform, Validation) {
  const PolarLayout layout{2.0, 2, 4};
  CharFnGrid wrong;
  wrong.mu = {0.0};
  wrong.c = {1.0};
  wrong.condition = {1.0};
  EXPECT_CONTRACT(resample_polar(wrong, layout, 21, 0.1), ErrorKind::contract);
}

TEST(WignerDirect, VacuumAnalyticAndResidue) {
  TransformSpec spec;
  const phase::WignerGrid w = wigner_direct(fock::make_state(64, fock::Fock{0}), spec);
  double worst = 0.0;
  for (std::size_t i = 0; i < spec.x.count; ++i)
    for (std::size_t j = 0; j < spec.p.count; ++j) {
      const double a2 = 0.5 * (spec.x.at(i) * spec.x.at(i) + spec.p.at(j) * spec.p.at(j));
      worst = std::max(worst, std::abs(w.at(i, j) - 2.0 / pi * std::exp(-2.0 * a2)));
    }
  EXPECT_LE(worst, 1e-3);
  EXPECT_LT(w.imag_residue, 1e-9);
  EXPECT_NEAR(w.integral(), 1.0, 2e-3);
}

// Round trip on the smaller aperture |mu| <= 4 with a +-4 output box.
TEST(RoundTrip, ApertureFour) {
  TransformSpec spec;
  spec.mu_nodes = 81;
  spec.aperture = 4.0;
  spec.x = spec.p = phase::Axis::centered(64, 0.125);
  const ProbeGridSpec gs{4.0, 100, 256, 400.0, 64};
  const ProbeGrid grid = probe_grid(gs, 830.0);
  const std::vector<fock::StateSpec> states{fock::Fock{0}, fock::Fock{1}, fock::Coherent{1.0}, fock::Cat{1.5, 0.0}};
  for (const auto& s : states) {
    const QuantumState rho = fock::make_state(64, s);
    const auto recs = synthesize_records(rho, AtomMixture::ground(), grid);
    const phase::WignerGrid recon = reconstruct_wigner(recs, grid.layout, spec);
    EXPECT_LE(phase::max_abs_diff(recon, wigner_direct(rho, spec)), 1e-3) << s.index();
  }
}

}  // namespace
}  // namespace mechtomo::tomo
