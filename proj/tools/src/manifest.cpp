#include "qmeval/cli/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <memory>

#include "qmeval/errors.hpp"

namespace qmeval::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  std::array<char, 1 << 16> buffer{};
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < length; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

std::string run_timestamp() {
  std::time_t t = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm utc{};
  gmtime_r(&t, &utc);
  char text[32];
  std::strftime(text, sizeof text, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return text;
}

std::string tool_version() { return QMEVAL_VERSION; }

nlohmann::ordered_json to_json(const RunManifest& m) {
  nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
  for (const auto& d : m.inputs) inputs.push_back({{"role", d.role}, {"path", d.path}, {"sha256", d.sha256}});
  return {{"tool", m.tool},   {"version", m.version}, {"subcommand", m.subcommand}, {"config", m.config},
          {"inputs", inputs}, {"seed", m.seed},       {"timestamp", m.timestamp}};
}

RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  m.tool = j.value("tool", "qmeval");
  m.version = j.value("version", "");
  m.subcommand = j.value("subcommand", "");
  m.config = j.value("config", nlohmann::ordered_json::object());
  for (const auto& d : j.value("inputs", nlohmann::json::array())) {
    m.inputs.push_back(InputDigest{d.value("role", ""), d.value("path", ""), d.value("sha256", "")});
  }
  m.seed = j.value("seed", std::uint64_t{0});
  m.timestamp = j.value("timestamp", "");
  return m;
}

}  // namespace qmeval::cli
