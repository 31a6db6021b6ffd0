#pragma once
// Text artifact formats. Every float is written with 17 significant digits so
// that reading a file back reproduces the doubles exactly. Metadata lines
// start with '#' and hold key=value pairs.
//
// records (version 1), comma separated, header row:
//   tau_s,phi_rad,intensity,rho_e,p_e,shots,p_e_sampled
//   shots and p_e_sampled are empty when no sampling was done.
//   Required metadata: g_rad_s.
// charfn (version 1): mu_re,mu_im,c_re,c_im,condition
// wigner (version 1): axis metadata, then one line per x node holding the
//   values for every p node, space separated.
// trajectory (version 1): one row per snapshot, see trajectory_to_text.

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mechtomo/backaction.hpp"
#include "mechtomo/phasespace.hpp"
#include "mechtomo/tomography.hpp"

namespace mechtomo::io {

inline constexpr int kFormatVersion = 1;

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

std::string format_double(double v);

using Metadata = std::map<std::string, std::string>;

// Writes to path.tmp then renames over path.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

std::string records_to_text(const std::vector<tomo::ProbeRecord>& records, double g, const Metadata& extra = {});
std::vector<tomo::ProbeRecord> records_from_text(const std::string& text, Metadata* meta = nullptr);

std::string charfn_to_text(const tomo::CharFnGrid& grid, const Metadata& extra = {});
tomo::CharFnGrid charfn_from_text(const std::string& text, Metadata* meta = nullptr);

std::string wigner_to_text(const phase::WignerGrid& grid, const Metadata& extra = {});
phase::WignerGrid wigner_from_text(const std::string& text, Metadata* meta = nullptr);

std::string trajectory_to_text(const backaction::TrajectoryLog& log, const std::vector<backaction::DisturbanceRow>& rows,
                               const Metadata& extra = {});

// Artifact kind from the first line ("# mechtomo <kind> v<N>"); empty if unknown.
std::string artifact_kind(const std::string& text);

}  // namespace mechtomo::io
