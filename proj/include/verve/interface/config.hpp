#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "verve/generator/generator.hpp"
#include "verve/rewriter/rewriter.hpp"

namespace verve::interface {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Relative paths resolve against PipelineConfig::checkpoint_root.
struct CheckpointPaths {
  std::string discriminator = "discriminator";
  std::string scorer = "scorer";
  std::string generator = "generators/seed-0/verve";
  std::string paraphrase = "lexical-v1";  // paraphraser id, not a path
  std::string coherence = "coherence";
  std::string language_model = "metrics/lm.json";
  std::string idf = "metrics/idf.json";
};

struct PipelineConfig {
  std::filesystem::path checkpoint_root = "models";
  CheckpointPaths checkpoints;
  rewriter::LoopConfig loop;
  generator::GenerationConfig decoding;
  std::string mask = "<mask>";
  std::uint64_t seed = 0;
  int port = 8080;
  std::size_t workers = 2;

  std::filesystem::path resolve(const std::string& path) const;
};

void to_json(nlohmann::json& j, const PipelineConfig& c);
void from_json(const nlohmann::json& j, PipelineConfig& c);

// Reads a JSON config file; ConfigError names the path on any failure.
PipelineConfig load_config(const std::filesystem::path& path);

// VERVE_PORT and VERVE_CHECKPOINT_ROOT override the file values.
void apply_env_overrides(PipelineConfig& c);

}  // namespace verve::interface
