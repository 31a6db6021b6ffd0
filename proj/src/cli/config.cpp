#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mechtomo/cli.hpp"

namespace mechtomo::cli {
namespace {

std::size_t line_of(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  return m.line >= 0 ? static_cast<std::size_t>(m.line) + 1 : 0;
}

template <class T>
T convert(const YAML::Node& node, const std::string& field) {
  if (!node.IsScalar()) throw ConfigError("field '" + field + "' must be a scalar", line_of(node));
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("field '" + field + "' has invalid value '" + node.Scalar() + "'", line_of(node));
  }
}

// One mapping of the config. Reads fields on request and reports the rest as unknown.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      throw ConfigError("section '" + path_ + "' must be a mapping", line_of(node_));
    }
  }

  bool present() const { return node_ && node_.IsMap(); }

  template <class T>
  bool get(const std::string& key, T& out) {
    known_.insert(key);
    if (!present()) return false;
    const YAML::Node v = node_[key];
    if (!v || v.IsNull()) return false;
    out = convert<T>(v, name(key));
    return true;
  }

  std::size_t line(const std::string& key) const {
    if (!present()) return 0;
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (it->first.Scalar() == key) return line_of(it->second);
    }
    return line_of(node_);
  }

  bool get_list(const std::string& key, std::vector<double>& out) {
    known_.insert(key);
    if (!present()) return false;
    const YAML::Node v = node_[key];
    if (!v) return false;
    if (!v.IsSequence()) throw ConfigError("field '" + name(key) + "' must be a list", line_of(v));
    out.clear();
    for (const auto& item : v) out.push_back(convert<double>(item, name(key)));
    return true;
  }

  Section child(const std::string& key) {
    known_.insert(key);
    if (!present()) return Section(YAML::Node(), name(key));
    return Section(node_[key], name(key));
  }

  // Throws for the first key that was never requested.
  void finish() const {
    if (!present()) return;
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      const std::string key = it->first.Scalar();
      if (!known_.count(key)) throw ConfigError("unknown key '" + name(key) + "'", line_of(it->first));
    }
  }

  std::string name(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> known_;
};

void require(bool ok, Section& s, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("field '" + s.name(key) + "' " + what, s.line(key));
}

void require_choice(const std::string& value, std::initializer_list<const char*> choices, Section& s,
                    const std::string& key) {
  std::string list;
  for (const char* c : choices) {
    if (value == c) return;
    list += list.empty() ? c : std::string(" | ") + c;
  }
  throw ConfigError("field '" + s.name(key) + "' must be one of " + list + ", got '" + value + "'", s.line(key));
}

void positive(double v, Section& s, const std::string& key) {
  require(std::isfinite(v) && v > 0.0, s, key, "must be positive");
}

void finite(double v, Section& s, const std::string& key) { require(std::isfinite(v), s, key, "must be finite"); }

void parse_state(Section s, StateConfig& st) {
  s.get("kind", st.kind);
  require_choice(st.kind, {"fock", "coherent", "thermal", "cat"}, s, "kind");
  s.get("n", st.n);
  s.get("alpha_re", st.alpha_re);
  s.get("alpha_im", st.alpha_im);
  s.get("mean_number", st.mean_number);
  s.get("relative_phase", st.relative_phase);
  finite(st.alpha_re, s, "alpha_re");
  finite(st.alpha_im, s, "alpha_im");
  finite(st.relative_phase, s, "relative_phase");
  require(std::isfinite(st.mean_number) && st.mean_number >= 0.0, s, "mean_number", "must be >= 0");
  s.finish();
}

void parse_device(Section s, DeviceConfig& d) {
  s.get("preset", d.preset);
  require_choice(d.preset, {"li6", "none"}, s, "preset");
  if (d.preset == "none") {
    d.params = {};
    d.raman = {};
  }
  s.get("m_c", d.params.m_c);
  s.get("omega_c", d.params.omega_c);
  s.get("omega_0", d.params.omega_0);
  s.get("mu_c", d.params.mu_c);
  s.get("r", d.params.r);
  s.get("g_F", d.params.g_F);
  s.get("m_Fx", d.params.m_Fx);
  s.get("omega_L_rabi", d.raman.omega_L_rabi);
  s.get("omega_k_rabi", d.raman.omega_k_rabi);
  s.get("delta_L", d.raman.delta_L);
  s.get("match", d.match);
  require_choice(d.match, {"none", "omega_L", "delta_L", "distance"}, s, "match");
  s.get("match_sign", d.match_sign);
  require_choice(d.match_sign, {"signed", "magnitude"}, s, "match_sign");
  s.finish();
}

void parse_coupling(Section s, CouplingConfig& c) {
  s.get("from_device", c.from_device);
  s.get("g", c.g);
  positive(c.g, s, "g");
  s.finish();
}

void parse_dynamics(Section s, DynamicsConfig& d) {
  s.get_list("intensities", d.intensities);
  require(!d.intensities.empty(), s, "intensities", "must not be empty");
  for (double i : d.intensities) positive(i, s, "intensities");
  s.get("g_tau_max", d.g_tau_max);
  positive(d.g_tau_max, s, "g_tau_max");
  s.get("tau_points", d.tau_points);
  require(d.tau_points >= 2, s, "tau_points", "must be >= 2");
  s.get("phonon_dim", d.phonon_dim);
  require(d.phonon_dim >= 1, s, "phonon_dim", "must be >= 1");
  s.get("phi", d.phi);
  finite(d.phi, s, "phi");
  s.finish();
}

void parse_tomography(Section s, TomographyConfig& t) {
  s.get("dim", t.dim);
  require(t.dim >= 1, s, "dim", "must be >= 1");
  s.get("mu_max", t.mu_max);
  positive(t.mu_max, s, "mu_max");
  s.get("radii", t.radii);
  require(t.radii >= 1, s, "radii", "must be >= 1");
  s.get("angles", t.angles);
  require(t.angles >= 1, s, "angles", "must be >= 1");
  s.get("base_intensity", t.base_intensity);
  positive(t.base_intensity, s, "base_intensity");
  s.get("mode", t.mode);
  require_choice(t.mode, {"closed_form", "exact"}, s, "mode");
  std::uint64_t shots = 0;
  if (s.get("shots", shots)) {
    require(shots >= 1, s, "shots", "must be >= 1");
    t.shots = shots;
  }
  s.get("mu_nodes", t.mu_nodes);
  require(t.mu_nodes >= 2, s, "mu_nodes", "must be >= 2");
  s.get("mu_step", t.mu_step);
  positive(t.mu_step, s, "mu_step");
  s.get("x_count", t.x_count);
  require(t.x_count >= 1, s, "x_count", "must be >= 1");
  s.get("x_step", t.x_step);
  positive(t.x_step, s, "x_step");
  s.get("p_count", t.p_count);
  require(t.p_count >= 1, s, "p_count", "must be >= 1");
  s.get("p_step", t.p_step);
  positive(t.p_step, s, "p_step");
  s.get("round_trip_tolerance", t.round_trip_tolerance);
  positive(t.round_trip_tolerance, s, "round_trip_tolerance");
  s.finish();
}

void parse_backaction(Section s, BackactionConfig& b) {
  s.get("steps", b.steps);
  s.get("dim", b.dim);
  require(b.dim >= 1, s, "dim", "must be >= 1");
  s.get("tau", b.tau);
  require(std::isfinite(b.tau) && b.tau >= 0.0, s, "tau", "must be >= 0");
  s.get("intensity", b.intensity);
  require(std::isfinite(b.intensity) && b.intensity >= 0.0, s, "intensity", "must be >= 0");
  s.get("phi", b.phi);
  finite(b.phi, s, "phi");
  s.get("policy", b.policy);
  require_choice(b.policy, {"condition_on_ground", "sample_outcomes"}, s, "policy");
  s.get("x_min", b.x_min);
  s.get("x_max", b.x_max);
  require(std::isfinite(b.x_min) && std::isfinite(b.x_max) && b.x_max > b.x_min, s, "x_max", "must exceed x_min");
  s.get("x_count", b.x_count);
  require(b.x_count >= 2, s, "x_count", "must be >= 2");
  s.get("p_min", b.p_min);
  s.get("p_max", b.p_max);
  require(std::isfinite(b.p_min) && std::isfinite(b.p_max) && b.p_max > b.p_min, s, "p_max", "must exceed p_min");
  s.get("p_count", b.p_count);
  require(b.p_count >= 2, s, "p_count", "must be >= 2");
  s.get("exact_check", b.exact_check);
  s.get("exact_phonon_dim", b.exact_phonon_dim);
  require(b.exact_phonon_dim >= 1, s, "exact_phonon_dim", "must be >= 1");
  s.get("exact_photon_dim", b.exact_photon_dim);
  s.finish();
}

}  // namespace

fock::StateSpec StateConfig::spec() const {
  const cplx alpha(alpha_re, alpha_im);
  if (kind == "coherent") return fock::Coherent{alpha};
  if (kind == "thermal") return fock::Thermal{mean_number};
  if (kind == "cat") return fock::Cat{alpha, relative_phase};
  return fock::Fock{n};
}

std::string StateConfig::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == "fock") {
    os << "fock(" << n << ")";
  } else if (kind == "thermal") {
    os << "thermal(" << mean_number << ")";
  } else {
    os << kind << "(" << alpha_re << (alpha_im < 0 ? "" : "+") << alpha_im << "i";
    if (kind == "cat") os << ", phase " << relative_phase;
    os << ")";
  }
  return os.str();
}

RunConfig parse_config(const std::string& yaml_text, const std::string& workflow) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("YAML syntax: " + e.msg, e.mark.line >= 0 ? static_cast<std::size_t>(e.mark.line) + 1 : 0);
  }
  RunConfig cfg;
  cfg.workflow = workflow;
  Section top(root, "");
  std::string declared;
  if (top.get("workflow", declared) && !workflow.empty() && declared != workflow) {
    throw ConfigError("config declares workflow '" + declared + "' but '" + workflow + "' was requested",
                      top.line("workflow"));
  }
  if (cfg.workflow.empty()) cfg.workflow = declared;
  bool known = false;
  for (const auto& w : workflows()) known = known || w == cfg.workflow;
  if (!known) throw ConfigError("unknown workflow '" + cfg.workflow + "'", top.line("workflow"));

  top.get("seed", cfg.seed);
  top.get("threads", cfg.threads);
  top.get("output_dir", cfg.output_dir);
  top.get("rho_e", cfg.rho_e);
  require(std::isfinite(cfg.rho_e) && cfg.rho_e >= 0.0 && cfg.rho_e <= 1.0, top, "rho_e", "must lie in [0, 1]");
  parse_state(top.child("state"), cfg.state);
  parse_device(top.child("device"), cfg.device);
  parse_coupling(top.child("coupling"), cfg.coupling);
  parse_dynamics(top.child("dynamics"), cfg.dynamics);
  parse_tomography(top.child("tomography"), cfg.tomography);
  parse_backaction(top.child("backaction"), cfg.backaction);
  top.finish();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, const std::string& workflow) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str(), workflow);
}

std::string echo_config(const RunConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "workflow" << YAML::Value << c.workflow;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  e << YAML::Key << "threads" << YAML::Value << c.threads;
  e << YAML::Key << "output_dir" << YAML::Value << c.output_dir;
  e << YAML::Key << "rho_e" << YAML::Value << c.rho_e;

  const auto& s = c.state;
  e << YAML::Key << "state" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << s.kind << YAML::Key << "n" << YAML::Value << s.n;
  e << YAML::Key << "alpha_re" << YAML::Value << s.alpha_re << YAML::Key << "alpha_im" << YAML::Value << s.alpha_im;
  e << YAML::Key << "mean_number" << YAML::Value << s.mean_number;
  e << YAML::Key << "relative_phase" << YAML::Value << s.relative_phase << YAML::EndMap;

  const auto& d = c.device;
  e << YAML::Key << "device" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "preset" << YAML::Value << d.preset;
  e << YAML::Key << "m_c" << YAML::Value << d.params.m_c;
  e << YAML::Key << "omega_c" << YAML::Value << d.params.omega_c;
  e << YAML::Key << "omega_0" << YAML::Value << d.params.omega_0;
  e << YAML::Key << "mu_c" << YAML::Value << d.params.mu_c;
  e << YAML::Key << "r" << YAML::Value << d.params.r;
  e << YAML::Key << "g_F" << YAML::Value << d.params.g_F;
  e << YAML::Key << "m_Fx" << YAML::Value << d.params.m_Fx;
  e << YAML::Key << "omega_L_rabi" << YAML::Value << d.raman.omega_L_rabi;
  e << YAML::Key << "omega_k_rabi" << YAML::Value << d.raman.omega_k_rabi;
  e << YAML::Key << "delta_L" << YAML::Value << d.raman.delta_L;
  e << YAML::Key << "match" << YAML::Value << d.match;
  e << YAML::Key << "match_sign" << YAML::Value << d.match_sign << YAML::EndMap;

  e << YAML::Key << "coupling" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "from_device" << YAML::Value << c.coupling.from_device;
  e << YAML::Key << "g" << YAML::Value << c.coupling.g << YAML::EndMap;

  const auto& dy = c.dynamics;
  e << YAML::Key << "dynamics" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "intensities" << YAML::Value << YAML::Flow << dy.intensities;
  e << YAML::Key << "g_tau_max" << YAML::Value << dy.g_tau_max;
  e << YAML::Key << "tau_points" << YAML::Value << dy.tau_points;
  e << YAML::Key << "phonon_dim" << YAML::Value << dy.phonon_dim;
  e << YAML::Key << "phi" << YAML::Value << dy.phi << YAML::EndMap;

  const auto& t = c.tomography;
  e << YAML::Key << "tomography" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "dim" << YAML::Value << t.dim;
  e << YAML::Key << "mu_max" << YAML::Value << t.mu_max;
  e << YAML::Key << "radii" << YAML::Value << t.radii;
  e << YAML::Key << "angles" << YAML::Value << t.angles;
  e << YAML::Key << "base_intensity" << YAML::Value << t.base_intensity;
  e << YAML::Key << "mode" << YAML::Value << t.mode;
  e << YAML::Key << "shots" << YAML::Value;
  if (t.shots) {
    e << *t.shots;
  } else {
    e << YAML::Null;
  }
  e << YAML::Key << "mu_nodes" << YAML::Value << t.mu_nodes;
  e << YAML::Key << "mu_step" << YAML::Value << t.mu_step;
  e << YAML::Key << "x_count" << YAML::Value << t.x_count;
  e << YAML::Key << "x_step" << YAML::Value << t.x_step;
  e << YAML::Key << "p_count" << YAML::Value << t.p_count;
  e << YAML::Key << "p_step" << YAML::Value << t.p_step;
  e << YAML::Key << "round_trip_tolerance" << YAML::Value << t.round_trip_tolerance << YAML::EndMap;

  const auto& b = c.backaction;
  e << YAML::Key << "backaction" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "steps" << YAML::Value << b.steps;
  e << YAML::Key << "dim" << YAML::Value << b.dim;
  e << YAML::Key << "tau" << YAML::Value << b.tau;
  e << YAML::Key << "intensity" << YAML::Value << b.intensity;
  e << YAML::Key << "phi" << YAML::Value << b.phi;
  e << YAML::Key << "policy" << YAML::Value << b.policy;
  e << YAML::Key << "x_min" << YAML::Value << b.x_min << YAML::Key << "x_max" << YAML::Value << b.x_max;
  e << YAML::Key << "x_count" << YAML::Value << b.x_count;
  e << YAML::Key << "p_min" << YAML::Value << b.p_min << YAML::Key << "p_max" << YAML::Value << b.p_max;
  e << YAML::Key << "p_count" << YAML::Value << b.p_count;
  e << YAML::Key << "exact_check" << YAML::Value << b.exact_check;
  e << YAML::Key << "exact_phonon_dim" << YAML::Value << b.exact_phonon_dim;
  e << YAML::Key << "exact_photon_dim" << YAML::Value << b.exact_photon_dim << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace mechtomo::cli
