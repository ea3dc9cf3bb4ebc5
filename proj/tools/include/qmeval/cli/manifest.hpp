#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qmeval::cli {

struct InputDigest {
  std::string role;  // ratings or predictions
  std::string path;  // as given on the command line
  std::string sha256;
};

struct RunManifest {
  std::string tool = "qmeval";
  std::string version;
  std::string subcommand;
  nlohmann::ordered_json config;
  std::vector<InputDigest> inputs;
  std::uint64_t seed = 0;
  std::string timestamp;  // ISO 8601, UTC
};

// Lowercase hex SHA-256 of a file's bytes. Throws InputError when unreadable.
std::string sha256_file(const std::filesystem::path& path);

// SOURCE_DATE_EPOCH when set (reproducible reruns), otherwise the wall clock.
std::string run_timestamp();

std::string tool_version();

nlohmann::ordered_json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

}  // namespace qmeval::cli
