#include "verve/nn/checkpoint.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace verve::nn {

std::string config_hash(const nlohmann::json& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : config.dump()) h = (h ^ c) * 1099511628211ULL;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(const std::filesystem::path& dir, Manifest m) {
  std::filesystem::create_directories(dir);
  if (m.config_hash.empty()) m.config_hash = config_hash(m.config);
  nlohmann::json j{{"architecture", m.architecture},
                   {"format_version", m.format_version},
                   {"config", m.config},
                   {"config_hash", m.config_hash},
                   {"metrics", m.metrics}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
  out << j.dump(2) << "\n";
}

Manifest read_manifest(const std::filesystem::path& dir, const std::string& expected_architecture) {
  const auto path = dir / "manifest.json";
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing checkpoint manifest: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed manifest " + path.string() + ": " + e.what());
  }
  Manifest m;
  m.architecture = j.value("architecture", "");
  m.format_version = j.value("format_version", 0);
  m.config = j.value("config", nlohmann::json::object());
  m.config_hash = j.value("config_hash", "");
  m.metrics = j.value("metrics", nlohmann::json::object());
  if (!expected_architecture.empty() && m.architecture != expected_architecture)
    throw std::runtime_error("checkpoint " + dir.string() + " has architecture '" + m.architecture +
                             "', expected '" + expected_architecture + "'");
  if (m.format_version != 1) throw std::runtime_error("unsupported checkpoint format in " + dir.string());
  return m;
}

}  // namespace verve::nn
