#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace verve::nn {

// Every checkpoint directory holds manifest.json next to its weights.
struct Manifest {
  std::string architecture;
  int format_version = 1;
  nlohmann::json config = nlohmann::json::object();
  std::string config_hash;
  nlohmann::json metrics = nlohmann::json::object();
};

// 16 hex digits of FNV-1a over the compact JSON dump.
std::string config_hash(const nlohmann::json& config);

void write_manifest(const std::filesystem::path& dir, Manifest m);
// Throws std::runtime_error when missing, malformed, or of another architecture
// (empty `expected_architecture` accepts any).
Manifest read_manifest(const std::filesystem::path& dir, const std::string& expected_architecture);

}  // namespace verve::nn
