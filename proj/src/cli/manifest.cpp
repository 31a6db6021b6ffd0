#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>

#include "mechtomo/cli.hpp"
#include "mechtomo/io.hpp"

namespace mechtomo::cli {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

std::string manifest_text(const std::vector<Artifact>& artifacts, const std::string& workflow,
                          const std::string& timestamp) {
  std::ostringstream os;
  os << "# mechtomo manifest v1\n";
  os << "# workflow=" << workflow << "\n";
  os << "# created=" << timestamp << "\n";
  os << "sha256,bytes,file\n";
  for (const auto& a : artifacts) os << sha256_hex(a.content) << ',' << a.content.size() << ',' << a.name << "\n";
  return os.str();
}

std::filesystem::path write_outputs(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts,
                                    const std::string& workflow) {
  std::filesystem::create_directories(dir);
  for (const auto& a : artifacts) io::write_atomic(dir / a.name, a.content);

  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
  const std::filesystem::path manifest = dir / "manifest.csv";
  io::write_atomic(manifest, manifest_text(artifacts, workflow, stamp));
  return manifest;
}

}  // namespace mechtomo::cli
