#pragma once
// Configuration-driven workflows behind the mechtomo command line tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mechtomo/device.hpp"
#include "mechtomo/fockspace.hpp"
#include "mechtomo/tomography.hpp"

namespace mechtomo::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitContract = 3;

// Invalid configuration or input artifact. line is 1-based, 0 when unknown.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct StateConfig {
  std::string kind = "fock";  // fock | coherent | thermal | cat
  std::size_t n = 0;
  double alpha_re = 0.0;
  double alpha_im = 0.0;
  double mean_number = 0.0;
  double relative_phase = 0.0;

  fock::StateSpec spec() const;
  std::string describe() const;
};

struct DeviceConfig {
  std::string preset = "li6";  // li6 | none; explicit fields override the preset
  device::DeviceParams params = device::reference_device();
  device::RamanParams raman = device::reference_raman();
  std::string match = "delta_L";     // none | omega_L | delta_L | distance
  std::string match_sign = "signed";  // signed | magnitude
};

struct CouplingConfig {
  bool from_device = false;  // use coupling_g_ac of the device section
  double g = 830.0;          // rad/s; |mu| = g tau
};

struct DynamicsConfig {
  std::vector<double> intensities{25.0, 100.0, 400.0};
  double g_tau_max = 1.0;
  std::size_t tau_points = 101;
  std::size_t phonon_dim = 16;
  double phi = 0.0;
};

struct TomographyConfig {
  std::size_t dim = 64;
  double mu_max = 5.4;
  std::size_t radii = 200;
  std::size_t angles = 512;
  double base_intensity = 400.0;
  std::string mode = "closed_form";  // closed_form | exact
  std::optional<std::uint64_t> shots;
  std::size_t mu_nodes = 109;
  double mu_step = 0.1;
  std::size_t x_count = 64;
  double x_step = 0.1875;
  std::size_t p_count = 64;
  double p_step = 0.1875;
  double round_trip_tolerance = 1e-3;
};

struct BackactionConfig {
  std::size_t steps = 4;
  std::size_t dim = 160;
  double tau = 5e-3;
  double intensity = 400.0;
  double phi = 0.0;
  std::string policy = "condition_on_ground";  // condition_on_ground | sample_outcomes
  double x_min = -5.0, x_max = 5.0;
  std::size_t x_count = 201;
  double p_min = -15.0, p_max = 15.0;
  std::size_t p_count = 301;
  bool exact_check = true;  // compare step 1 against the exact two-mode reduced state
  std::size_t exact_phonon_dim = 48;
  std::size_t exact_photon_dim = 0;  // 0: ceil(I + 6 sqrt(I) + 10)
};

struct RunConfig {
  std::string workflow;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  std::string output_dir = "mechtomo_out";
  double rho_e = 0.0;
  StateConfig state;
  DeviceConfig device;
  CouplingConfig coupling;
  DynamicsConfig dynamics;
  TomographyConfig tomography;
  BackactionConfig backaction;
};

inline const std::vector<std::string>& workflows() {
  static const std::vector<std::string> names{"device", "dynamics-convergence", "tomography", "backaction"};
  return names;
}

// Strict: unknown keys, wrong types and out-of-range values raise ConfigError.
RunConfig parse_config(const std::string& yaml_text, const std::string& workflow);
RunConfig load_config(const std::filesystem::path& path, const std::string& workflow);
// Every field with its resolved value, as YAML.
std::string echo_config(const RunConfig& config);

struct Artifact {
  std::string name;
  std::string content;
};

struct WorkflowResult {
  std::vector<Artifact> artifacts;
  std::string summary;  // printed to stdout
};

WorkflowResult run_workflow(const RunConfig& config);

std::string sha256_hex(const std::string& bytes);
std::string manifest_text(const std::vector<Artifact>& artifacts, const std::string& workflow,
                          const std::string& timestamp);
// Writes every artifact atomically, then the manifest. Returns the manifest path.
std::filesystem::path write_outputs(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts,
                                    const std::string& workflow);

// gnuplot-ready text for a wigner, records, charfn, trajectory or series artifact.
// Throws ConfigError for unreadable or unknown artifacts.
std::string plotdata(const std::string& artifact_text);

}  // namespace mechtomo::cli
