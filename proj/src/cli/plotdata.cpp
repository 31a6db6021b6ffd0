#include <sstream>

#include "mechtomo/cli.hpp"
#include "mechtomo/io.hpp"

namespace mechtomo::cli {
namespace {

using io::format_double;

std::string wigner_xyz(const std::string& text) {
  const phase::WignerGrid w = io::wigner_from_text(text);
  std::ostringstream os;
  os << "# x p W\n";
  for (std::size_t ix = 0; ix < w.x.count; ++ix) {
    if (ix > 0) os << "\n";
    for (std::size_t ip = 0; ip < w.p.count; ++ip) {
      os << format_double(w.x.at(ix)) << ' ' << format_double(w.p.at(ip)) << ' ' << format_double(w.at(ix, ip))
         << "\n";
    }
  }
  return os.str();
}

// One gnuplot data block per phase, in first-appearance order.
std::string records_series(const std::string& text) {
  const std::vector<tomo::ProbeRecord> records = io::records_from_text(text);
  std::vector<double> phis;
  for (const auto& r : records) {
    bool seen = false;
    for (double p : phis) seen = seen || p == r.point.phi;
    if (!seen) phis.push_back(r.point.phi);
  }
  std::ostringstream os;
  for (std::size_t k = 0; k < phis.size(); ++k) {
    if (k > 0) os << "\n\n";
    os << "# phi=" << format_double(phis[k]) << "\n# tau p_e intensity\n";
    for (const auto& r : records) {
      if (r.point.phi != phis[k]) continue;
      os << format_double(r.point.tau) << ' ' << format_double(r.observed()) << ' '
         << format_double(r.point.intensity) << "\n";
    }
  }
  return os.str();
}

std::string charfn_columns(const std::string& text) {
  const tomo::CharFnGrid g = io::charfn_from_text(text);
  std::ostringstream os;
  os << "# mu_re mu_im c_re c_im condition\n";
  for (std::size_t i = 0; i < g.mu.size(); ++i) {
    os << format_double(g.mu[i].real()) << ' ' << format_double(g.mu[i].imag()) << ' ' << format_double(g.c[i].real())
       << ' ' << format_double(g.c[i].imag()) << ' ' << format_double(g.condition[i]) << "\n";
  }
  return os.str();
}

// Comma-separated table with a header row: comments kept, header commented,
// empty fields become nan.
std::string generic_table(const std::string& text) {
  std::istringstream is(text);
  std::ostringstream os;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      os << line << "\n";
      continue;
    }
    std::string out;
    std::string field;
    std::istringstream fs(line);
    bool first = true;
    auto put = [&](const std::string& f) {
      if (!first) out += ' ';
      out += f.empty() ? "nan" : f;
      first = false;
    };
    while (std::getline(fs, field, ',')) put(field);
    if (line.back() == ',') put("");
    os << (header ? "# " : "") << out << "\n";
    header = false;
  }
  return os.str();
}

}  // namespace

std::string plotdata(const std::string& text) {
  const std::string kind = io::artifact_kind(text);
  try {
    if (kind == "wigner") return wigner_xyz(text);
    if (kind == "records") return records_series(text);
    if (kind == "charfn") return charfn_columns(text);
    if (kind == "trajectory" || kind == "series") return generic_table(text);
  } catch (const io::ParseError& e) {
    throw ConfigError("corrupt " + kind + " artifact: " + e.what(), e.line());
  }
  throw ConfigError(kind.empty() ? "not a mechtomo artifact" : "artifact kind '" + kind + "' has no plot form");
}

}  // namespace mechtomo::cli
