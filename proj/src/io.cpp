#include "mechtomo/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include "mechtomo/error.hpp"

namespace mechtomo::io {
namespace {

std::string header_line(const std::string& kind) {
  return "# mechtomo " + kind + " v" + std::to_string(kFormatVersion) + "\n";
}

void put_meta(std::ostringstream& os, const std::string& key, const std::string& value) {
  os << "# " << key << "=" << value << "\n";
}

void put_extra(std::ostringstream& os, const Metadata& extra) {
  for (const auto& [k, v] : extra) put_meta(os, k, v);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ParseError("not a number: '" + s + "'", line);
  return v;
}

std::uint64_t parse_u64(const std::string& s, std::size_t line) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("not an unsigned integer: '" + s + "'", line);
  return v;
}

// Splits text into lines; validates the kind line and collects metadata.
// Returns the index of the first non-comment line.
struct Parsed {
  std::vector<std::string> lines;
  Metadata meta;
  std::size_t body = 0;
};

Parsed parse_common(const std::string& text, const std::string& kind) {
  Parsed p;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    p.lines.push_back(line);
  }
  const std::string expected = header_line(kind);
  if (p.lines.empty() || p.lines[0] + "\n" != expected) {
    throw ParseError("expected '" + expected.substr(0, expected.size() - 1) + "'", 1);
  }
  std::size_t i = 1;
  for (; i < p.lines.size() && !p.lines[i].empty() && p.lines[i][0] == '#'; ++i) {
    const std::string body = p.lines[i].substr(p.lines[i].find_first_not_of("# "));
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("metadata line without '='", i + 1);
    p.meta[body.substr(0, eq)] = body.substr(eq + 1);
  }
  p.body = i;
  return p;
}

const std::string& require_meta(const Parsed& p, const std::string& key) {
  const auto it = p.meta.find(key);
  if (it == p.meta.end()) throw ParseError("missing metadata '" + key + "'", 1);
  return it->second;
}

const char* kRecordColumns = "tau_s,phi_rad,intensity,rho_e,p_e,shots,p_e_sampled";
const char* kCharFnColumns = "mu_re,mu_im,c_re,c_im,condition";

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string artifact_kind(const std::string& text) {
  const std::string prefix = "# mechtomo ";
  if (text.compare(0, prefix.size(), prefix) != 0) return "";
  const auto end = text.find(' ', prefix.size());
  if (end == std::string::npos) return "";
  return text.substr(prefix.size(), end - prefix.size());
}

// ---------------------------------------------------------------------------

std::string records_to_text(const std::vector<tomo::ProbeRecord>& records, double g, const Metadata& extra) {
  std::ostringstream os;
  os << header_line("records");
  put_meta(os, "g_rad_s", format_double(g));
  put_extra(os, extra);
  os << kRecordColumns << "\n";
  for (const auto& r : records) {
    os << format_double(r.point.tau) << ',' << format_double(r.point.phi) << ',' << format_double(r.point.intensity)
       << ',' << format_double(r.atom.rho_e) << ',' << format_double(r.p_e) << ',';
    if (r.shots) os << *r.shots;
    os << ',';
    if (r.p_e_sampled) os << format_double(*r.p_e_sampled);
    os << "\n";
  }
  return os.str();
}

std::vector<tomo::ProbeRecord> records_from_text(const std::string& text, Metadata* meta) {
  const Parsed p = parse_common(text, "records");
  const double g = parse_double(require_meta(p, "g_rad_s"), 2);
  if (p.body >= p.lines.size() || p.lines[p.body] != kRecordColumns) {
    throw ParseError(std::string("expected column header '") + kRecordColumns + "'", p.body + 1);
  }
  std::vector<tomo::ProbeRecord> out;
  for (std::size_t i = p.body + 1; i < p.lines.size(); ++i) {
    const std::size_t line = i + 1;
    if (p.lines[i].empty()) continue;
    const auto f = split(p.lines[i], ',');
    if (f.size() != 7) throw ParseError("expected 7 fields, found " + std::to_string(f.size()), line);
    tomo::ProbeRecord r;
    try {
      r.point = tomo::ProbePoint::make(g, parse_double(f[0], line), parse_double(f[1], line), parse_double(f[2], line));
      const double rho_e = parse_double(f[3], line);
      r.atom = dynamics::AtomMixture{rho_e, 1.0 - rho_e};
      r.atom.validate();
    } catch (const ContractError& e) {
      throw ParseError(e.what(), line);
    }
    r.p_e = parse_double(f[4], line);
    if (!(r.p_e >= 0.0 && r.p_e <= 1.0)) throw ParseError("p_e outside [0, 1]", line);
    if (f[5].empty() != f[6].empty()) throw ParseError("shots and p_e_sampled must be given together", line);
    if (!f[5].empty()) {
      r.shots = parse_u64(f[5], line);
      r.p_e_sampled = parse_double(f[6], line);
    }
    out.push_back(r);
  }
  if (meta) *meta = p.meta;
  return out;
}

// ---------------------------------------------------------------------------

std::string charfn_to_text(const tomo::CharFnGrid& grid, const Metadata& extra) {
  std::ostringstream os;
  os << header_line("charfn");
  put_meta(os, "source", grid.source == tomo::CharFnSource::direct ? "direct" : "reconstructed");
  put_meta(os, "origin_deviation", format_double(grid.origin_deviation));
  put_extra(os, extra);
  os << kCharFnColumns << "\n";
  for (std::size_t i = 0; i < grid.mu.size(); ++i) {
    os << format_double(grid.mu[i].real()) << ',' << format_double(grid.mu[i].imag()) << ','
       << format_double(grid.c[i].real()) << ',' << format_double(grid.c[i].imag()) << ','
       << format_double(grid.condition[i]) << "\n";
  }
  return os.str();
}

tomo::CharFnGrid charfn_from_text(const std::string& text, Metadata* meta) {
  const Parsed p = parse_common(text, "charfn");
  tomo::CharFnGrid grid;
  const std::string& source = require_meta(p, "source");
  if (source == "direct") {
    grid.source = tomo::CharFnSource::direct;
  } else if (source == "reconstructed") {
    grid.source = tomo::CharFnSource::reconstructed;
  } else {
    throw ParseError("unknown source '" + source + "'", 2);
  }
  grid.origin_deviation = parse_double(require_meta(p, "origin_deviation"), 3);
  if (p.body >= p.lines.size() || p.lines[p.body] != kCharFnColumns) {
    throw ParseError(std::string("expected column header '") + kCharFnColumns + "'", p.body + 1);
  }
  for (std::size_t i = p.body + 1; i < p.lines.size(); ++i) {
    const std::size_t line = i + 1;
    if (p.lines[i].empty()) continue;
    const auto f = split(p.lines[i], ',');
    if (f.size() != 5) throw ParseError("expected 5 fields, found " + std::to_string(f.size()), line);
    grid.mu.emplace_back(parse_double(f[0], line), parse_double(f[1], line));
    grid.c.emplace_back(parse_double(f[2], line), parse_double(f[3], line));
    grid.condition.push_back(parse_double(f[4], line));
  }
  if (meta) *meta = p.meta;
  return grid;
}

// ---------------------------------------------------------------------------

std::string wigner_to_text(const phase::WignerGrid& grid, const Metadata& extra) {
  std::ostringstream os;
  os << header_line("wigner");
  put_meta(os, "convention", "alpha=(x+ip)/sqrt(2); sum(W)*dx*dp/2=1");
  put_meta(os, "x_min", format_double(grid.x.min));
  put_meta(os, "x_step", format_double(grid.x.step));
  put_meta(os, "x_count", std::to_string(grid.x.count));
  put_meta(os, "p_min", format_double(grid.p.min));
  put_meta(os, "p_step", format_double(grid.p.step));
  put_meta(os, "p_count", std::to_string(grid.p.count));
  put_meta(os, "imag_residue", format_double(grid.imag_residue));
  for (std::size_t i = 0; i < grid.warnings.size(); ++i) put_meta(os, "warning_" + std::to_string(i), grid.warnings[i]);
  put_extra(os, extra);
  for (std::size_t ix = 0; ix < grid.x.count; ++ix) {
    for (std::size_t ip = 0; ip < grid.p.count; ++ip) {
      if (ip) os << ' ';
      os << format_double(grid.at(ix, ip));
    }
    os << "\n";
  }
  return os.str();
}

phase::WignerGrid wigner_from_text(const std::string& text, Metadata* meta) {
  const Parsed p = parse_common(text, "wigner");
  phase::WignerGrid grid;
  grid.x = phase::Axis{parse_double(require_meta(p, "x_min"), 1), parse_double(require_meta(p, "x_step"), 1),
                       parse_u64(require_meta(p, "x_count"), 1)};
  grid.p = phase::Axis{parse_double(require_meta(p, "p_min"), 1), parse_double(require_meta(p, "p_step"), 1),
                       parse_u64(require_meta(p, "p_count"), 1)};
  grid.imag_residue = parse_double(require_meta(p, "imag_residue"), 1);
  for (const auto& [k, v] : p.meta) {
    if (k.rfind("warning_", 0) == 0) grid.warnings.push_back(v);
  }
  grid.values.reserve(grid.x.count * grid.p.count);
  std::size_t rows = 0;
  for (std::size_t i = p.body; i < p.lines.size(); ++i) {
    if (p.lines[i].empty()) continue;
    const auto f = split(p.lines[i], ' ');
    if (f.size() != grid.p.count) {
      throw ParseError("expected " + std::to_string(grid.p.count) + " values, found " + std::to_string(f.size()), i + 1);
    }
    for (const auto& s : f) grid.values.push_back(parse_double(s, i + 1));
    ++rows;
  }
  if (rows != grid.x.count) {
    throw ParseError("expected " + std::to_string(grid.x.count) + " rows, found " + std::to_string(rows), p.lines.size());
  }
  if (meta) *meta = p.meta;
  return grid;
}

// ---------------------------------------------------------------------------

std::string trajectory_to_text(const backaction::TrajectoryLog& log, const std::vector<backaction::DisturbanceRow>& rows,
                               const Metadata& extra) {
  std::ostringstream os;
  os << header_line("trajectory");
  put_meta(os, "initial", log.initial);
  put_meta(os, "steps", std::to_string(log.steps.size()));
  put_meta(os, "joint_probability", format_double(log.joint_probability));
  put_extra(os, extra);
  os << "step,outcome,tau_s,intensity,phi_rad,probability,p_ground,p_excited,fidelity,mean_phonon,purity,"
        "negativity,spread,integral\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    os << r.step << ',';
    if (i == 0) {
      os << "initial,,,,,,";
    } else {
      const auto& s = log.steps[i - 1];
      os << (s.outcome == backaction::Outcome::ground ? "ground" : "excited") << ',' << format_double(s.tau) << ','
         << format_double(s.raman.intensity) << ',' << format_double(s.raman.phi) << ','
         << format_double(s.probability) << ',' << format_double(s.p_ground) << ',' << format_double(s.p_excited);
    }
    os << ',' << format_double(r.fidelity) << ',' << format_double(r.mean_phonon) << ',' << format_double(r.purity)
       << ',' << format_double(r.negativity) << ',' << format_double(r.spread) << ',' << format_double(r.integral)
       << "\n";
  }
  return os.str();
}

}  // namespace mechtomo::io
