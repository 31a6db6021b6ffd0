#include <algorithm>
#include <cmath>
#include <sstream>

#include "mechtomo/backaction.hpp"
#include "mechtomo/cli.hpp"
#include "mechtomo/dynamics.hpp"
#include "mechtomo/error.hpp"
#include "mechtomo/io.hpp"
#include "mechtomo/phasespace.hpp"

namespace mechtomo::cli {
namespace {

using io::format_double;

std::string series_header(const std::string& what) { return "# mechtomo series v1\n# series=" + what + "\n"; }

double coupling_g(const RunConfig& c) {
  if (!c.coupling.from_device) return c.coupling.g;
  c.device.params.validate();
  const double g = std::abs(device::coupling_g_ac(c.device.params));
  if (!(g > 0.0)) throw ContractError(ErrorKind::contract, "device", "device coupling g_ac is zero");
  return g;
}

fock::QuantumState cantilever(const RunConfig& c, std::size_t dim) { return fock::make_state(dim, c.state.spec()); }

WorkflowResult run_device(const RunConfig& c) {
  const DeviceConfig& d = c.device;
  d.params.validate();
  std::ostringstream os;
  os << "# mechtomo device v1\n";
  os << "preset=" << d.preset << "\n";
  const double g_ac = device::coupling_g_ac(d.params);
  os << "gradient_T_per_m=" << format_double(device::magnetic_gradient(d.params.mu_c, d.params.r)) << "\n";
  os << "x_zpf_m=" << format_double(device::zero_point_amplitude(d.params)) << "\n";
  os << "g_ac_rad_s=" << format_double(g_ac) << "\n";
  d.raman.validate();
  os << "g_raman_rad_s=" << format_double(device::raman_coupling(d.raman)) << "\n";
  os << "match=" << d.match << "\n";
  device::RamanParams matched_raman = d.raman;
  device::DeviceParams matched_device = d.params;
  if (d.match != "none") {
    const auto sign = d.match_sign == "signed" ? device::MatchSign::signed_equality : device::MatchSign::magnitude_only;
    if (d.match == "omega_L") {
      matched_raman.omega_L_rabi = device::match_couplings(d.params, d.raman, device::FreeParameter::omega_L, sign);
      os << "matched_omega_L_rabi_rad_s=" << format_double(matched_raman.omega_L_rabi) << "\n";
    } else if (d.match == "delta_L") {
      matched_raman.delta_L = device::match_couplings(d.params, d.raman, device::FreeParameter::delta_L, sign);
      os << "matched_delta_L_rad_s=" << format_double(matched_raman.delta_L) << "\n";
    } else {
      matched_device.r = device::match_couplings(d.params, d.raman, device::FreeParameter::distance, sign);
      os << "matched_r_m=" << format_double(matched_device.r) << "\n";
    }
    os << "matched_g_ac_rad_s=" << format_double(device::coupling_g_ac(matched_device)) << "\n";
    os << "matched_g_raman_rad_s=" << format_double(device::raman_coupling(matched_raman)) << "\n";
  }
  os << "detuning_warning=" << (matched_raman.detuning_warning(d.params.omega_0) ? "true" : "false") << "\n";
  const device::ResonanceReport rr = device::resonance_report(d.params);
  os << "resonance_detuning_rad_s=" << format_double(rr.detuning) << "\n";
  os << "resonance_threshold_rad_s=" << format_double(rr.threshold) << "\n";
  os << "resonant=" << (rr.resonant ? "true" : "false") << "\n";
  os << "resonance_note=" << rr.note << "\n";

  WorkflowResult r;
  r.artifacts.push_back({"device_report.txt", os.str()});
  r.summary = os.str();
  return r;
}

WorkflowResult run_dynamics(const RunConfig& c) {
  const DynamicsConfig& dy = c.dynamics;
  const double g = coupling_g(c);
  const auto am = dynamics::AtomMixture::with_excited(c.rho_e);
  const fock::QuantumState rho = cantilever(c, dy.phonon_dim);
  const auto cs = dynamics::CouplingSet::matched_at(g);
  std::vector<double> taus(dy.tau_points);
  for (std::size_t k = 0; k < taus.size(); ++k) {
    taus[k] = dy.g_tau_max / g * static_cast<double>(k) / static_cast<double>(taus.size() - 1);
  }

  WorkflowResult r;
  std::ostringstream conv;
  conv << series_header("large_i_convergence");
  conv << "# state=" << c.state.describe() << "\n";
  conv << "intensity,max_dev_quantized,max_dev_classical,large_i_warning\n";
  std::ostringstream summary;
  std::vector<double> devs;
  for (double intensity : dy.intensities) {
    const std::vector<double> exact = dynamics::pe_two_mode(rho, am, cs, intensity, dy.phi, taus);
    const std::vector<double> classical = dynamics::pe_classical_drive(rho, am, cs, intensity, dy.phi, taus);
    std::ostringstream series;
    series << series_header("pe_vs_tau");
    series << "# intensity=" << format_double(intensity) << "\n";
    series << "tau_s,pe_approx,pe_quantized,pe_classical\n";
    double dev_q = 0.0, dev_c = 0.0;
    bool warning = false;
    for (std::size_t k = 0; k < taus.size(); ++k) {
      const tomo::PeApprox a = tomo::pe_approx(rho, am, g, taus[k], intensity, dy.phi);
      warning = warning || a.large_i_warning;
      dev_q = std::max(dev_q, std::abs(a.p_e - exact[k]));
      dev_c = std::max(dev_c, std::abs(a.p_e - classical[k]));
      series << format_double(taus[k]) << ',' << format_double(a.p_e) << ',' << format_double(exact[k]) << ','
             << format_double(classical[k]) << "\n";
    }
    devs.push_back(dev_q);
    conv << format_double(intensity) << ',' << format_double(dev_q) << ',' << format_double(dev_c) << ','
         << (warning ? "true" : "false") << "\n";
    summary << "I=" << intensity << " max|approx-quantized|=" << dev_q << " max|approx-classical|=" << dev_c
            << (warning ? " (large-I warning)" : "") << "\n";
    std::ostringstream name;
    name << "series_I" << intensity << ".csv";
    r.artifacts.push_back({name.str(), series.str()});
  }
  bool monotone = true;
  for (std::size_t i = 1; i < devs.size(); ++i) monotone = monotone && devs[i] < devs[i - 1];
  summary << "quantized deviation decreasing: " << (monotone ? "yes" : "no") << "\n";
  r.artifacts.insert(r.artifacts.begin(), {"convergence.csv", conv.str()});
  r.summary = summary.str();
  return r;
}

WorkflowResult run_tomography(const RunConfig& c) {
  const TomographyConfig& t = c.tomography;
  const double g = coupling_g(c);
  const auto am = dynamics::AtomMixture::with_excited(c.rho_e);
  const fock::QuantumState rho = cantilever(c, t.dim);

  tomo::ProbeGridSpec gs;
  gs.mu_max = t.mu_max;
  gs.radii = t.radii;
  gs.angles = t.angles;
  gs.base_intensity = t.base_intensity;
  gs.dim = t.dim;
  const tomo::ProbeGrid grid = tomo::probe_grid(gs, g);

  tomo::SynthesisOptions so;
  so.mode = t.mode == "exact" ? tomo::SynthesisMode::exact : tomo::SynthesisMode::closed_form;
  so.shots = t.shots;
  so.seed = c.seed;
  const std::vector<tomo::ProbeRecord> records = tomo::synthesize_records(rho, am, grid, so);

  tomo::TransformSpec ts;
  ts.mu_nodes = t.mu_nodes;
  ts.mu_step = t.mu_step;
  ts.aperture = t.mu_max;
  ts.x = phase::Axis::centered(t.x_count, t.x_step);
  ts.p = phase::Axis::centered(t.p_count, t.p_step);

  tomo::CharFnGrid extracted;
  const phase::WignerGrid recon = tomo::reconstruct_wigner(records, grid.layout, ts, &extracted);
  const phase::WignerGrid direct = tomo::wigner_direct(rho, ts);
  const double error = phase::max_abs_diff(recon, direct);

  const io::Metadata meta{{"state", c.state.describe()}};
  WorkflowResult r;
  r.artifacts.push_back({"records.csv", io::records_to_text(records, g, meta)});
  r.artifacts.push_back({"charfn.csv", io::charfn_to_text(extracted, meta)});
  r.artifacts.push_back({"wigner_reconstructed.txt", io::wigner_to_text(recon, meta)});
  r.artifacts.push_back({"wigner_direct.txt", io::wigner_to_text(direct, meta)});

  double max_condition = 0.0;
  for (double k : extracted.condition) max_condition = std::max(max_condition, k);
  std::ostringstream os;
  os << "# mechtomo summary v1\n";
  os << "state=" << c.state.describe() << "\n";
  os << "records=" << records.size() << "\n";
  os << "shots=" << (t.shots ? std::to_string(*t.shots) : std::string("none")) << "\n";
  os << "max_abs_error=" << format_double(error) << "\n";
  os << "tolerance=" << format_double(t.round_trip_tolerance) << "\n";
  os << "within_tolerance=" << (error <= t.round_trip_tolerance ? "true" : "false") << "\n";
  os << "w_origin=" << format_double(recon.nearest(0.0, 0.0)) << "\n";
  os << "w_min=" << format_double(recon.min_value()) << "\n";
  os << "integral=" << format_double(recon.integral()) << "\n";
  os << "imag_residue=" << format_double(recon.imag_residue) << "\n";
  os << "origin_deviation=" << format_double(extracted.origin_deviation) << "\n";
  os << "max_condition=" << format_double(max_condition) << "\n";
  for (std::size_t i = 0; i < recon.warnings.size(); ++i) os << "warning_" << i << "=" << recon.warnings[i] << "\n";
  r.artifacts.push_back({"summary.txt", os.str()});
  r.summary = os.str();
  return r;
}

WorkflowResult run_backaction(const RunConfig& c) {
  const BackactionConfig& b = c.backaction;
  const double g = coupling_g(c);
  const backaction::RamanSetting raman{b.intensity, b.phi};
  const std::vector<backaction::ScheduleEntry> schedule(b.steps, backaction::ScheduleEntry{b.tau, raman});
  backaction::SequencePolicy policy;
  policy.kind = b.policy == "sample_outcomes" ? backaction::SequencePolicy::Kind::sample_outcomes
                                              : backaction::SequencePolicy::Kind::condition_on_ground;
  policy.seed = c.seed;

  const fock::QuantumState psi0 = cantilever(c, b.dim);
  const backaction::TrajectoryLog log =
      backaction::run_sequence(psi0, b.steps, schedule, g, policy, c.state.describe());
  backaction::SnapshotSpec ss;
  ss.x = phase::Axis::linspace(b.x_min, b.x_max, b.x_count);
  ss.p = phase::Axis::linspace(b.p_min, b.p_max, b.p_count);
  ss.direction = std::arg(I_unit * std::polar(1.0, b.phi));
  const std::vector<phase::WignerGrid> grids = backaction::snapshots(log, ss);
  const std::vector<backaction::DisturbanceRow> rows = backaction::disturbance_report(log, grids, ss.direction);

  WorkflowResult r;
  io::Metadata meta{{"g_rad_s", format_double(g)}, {"mu_im", format_double(g * b.tau)}};
  r.artifacts.push_back({"trajectory.csv", io::trajectory_to_text(log, rows, meta)});
  for (std::size_t i = 0; i < grids.size(); ++i) {
    r.artifacts.push_back({"wigner_step" + std::to_string(i) + ".txt",
                           io::wigner_to_text(grids[i], {{"step", std::to_string(i)}})});
  }

  std::ostringstream os;
  for (const auto& row : rows) {
    os << "step " << row.step << ": spread=" << row.spread << " purity=" << row.purity << " fidelity=" << row.fidelity
       << " negativity=" << row.negativity << "\n";
  }
  os << "joint probability=" << log.joint_probability << "\n";

  if (b.exact_check && b.steps > 0) {
    const fock::QuantumState start = cantilever(c, b.exact_phonon_dim);
    const backaction::Outcome outcome = log.steps.front().outcome;
    const auto approx = backaction::conditional_update(start, outcome, g, b.tau, raman, backaction::UpdateMode::large_i);
    const auto exact = backaction::conditional_update(start, outcome, g, b.tau, raman, backaction::UpdateMode::exact,
                                                      b.exact_photon_dim);
    const auto classical =
        backaction::conditional_update(start, outcome, g, b.tau, raman, backaction::UpdateMode::classical_exact);
    std::ostringstream ck;
    ck << "# mechtomo summary v1\n";
    ck << "outcome=" << (outcome == backaction::Outcome::ground ? "ground" : "excited") << "\n";
    ck << "phonon_dim=" << b.exact_phonon_dim << "\n";
    ck << "p_large_i=" << format_double(approx.probability) << "\n";
    ck << "p_exact=" << format_double(exact.probability) << "\n";
    ck << "p_classical=" << format_double(classical.probability) << "\n";
    ck << "infidelity_exact=" << format_double(1.0 - fock::fidelity(approx.state, exact.state)) << "\n";
    ck << "purity_exact=" << format_double(exact.purity) << "\n";
    ck << "infidelity_classical=" << format_double(1.0 - fock::fidelity(approx.state, classical.state)) << "\n";
    r.artifacts.push_back({"step1_check.txt", ck.str()});
    os << ck.str();
  }
  r.summary = os.str();
  return r;
}

}  // namespace

WorkflowResult run_workflow(const RunConfig& config) {
  if (config.workflow == "device") return run_device(config);
  if (config.workflow == "dynamics-convergence") return run_dynamics(config);
  if (config.workflow == "tomography") return run_tomography(config);
  if (config.workflow == "backaction") return run_backaction(config);
  throw ConfigError("unknown workflow '" + config.workflow + "'");
}

}  // namespace mechtomo::cli
