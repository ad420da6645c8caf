#include "verve/interface/config.hpp"

#include <cstdlib>
#include <fstream>

namespace verve::interface {

std::filesystem::path PipelineConfig::resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  return p.is_absolute() ? p : checkpoint_root / p;
}

void to_json(nlohmann::json& j, const PipelineConfig& c) {
  const auto& k = c.checkpoints;
  j = {{"checkpoint_root", c.checkpoint_root.string()},
       {"checkpoints",
        {{"discriminator", k.discriminator},
         {"scorer", k.scorer},
         {"generator", k.generator},
         {"paraphrase", k.paraphrase},
         {"coherence", k.coherence},
         {"language_model", k.language_model},
         {"idf", k.idf}}},
       {"loop", c.loop},
       {"decoding",
        {{"beams", c.decoding.beams}, {"max_length", c.decoding.max_length}, {"length_penalty", c.decoding.length_penalty}}},
       {"mask", c.mask},
       {"seed", c.seed},
       {"server", {{"port", c.port}, {"workers", c.workers}}}};
}

void from_json(const nlohmann::json& j, PipelineConfig& c) {
  const PipelineConfig d;
  c.checkpoint_root = j.value("checkpoint_root", d.checkpoint_root.string());
  if (j.contains("checkpoints")) {
    const auto& k = j.at("checkpoints");
    auto& o = c.checkpoints;
    o.discriminator = k.value("discriminator", d.checkpoints.discriminator);
    o.scorer = k.value("scorer", d.checkpoints.scorer);
    o.generator = k.value("generator", d.checkpoints.generator);
    o.paraphrase = k.value("paraphrase", d.checkpoints.paraphrase);
    o.coherence = k.value("coherence", d.checkpoints.coherence);
    o.language_model = k.value("language_model", d.checkpoints.language_model);
    o.idf = k.value("idf", d.checkpoints.idf);
  }
  c.loop = j.contains("loop") ? j.at("loop").get<rewriter::LoopConfig>() : d.loop;
  if (j.contains("decoding")) {
    const auto& g = j.at("decoding");
    c.decoding.beams = g.value("beams", d.decoding.beams);
    c.decoding.max_length = g.value("max_length", d.decoding.max_length);
    c.decoding.length_penalty = g.value("length_penalty", d.decoding.length_penalty);
  }
  if (c.decoding.beams == 0) throw std::invalid_argument("decoding.beams must be positive");
  c.mask = j.value("mask", d.mask);
  if (c.mask.empty()) throw std::invalid_argument("mask sentinel must not be empty");
  c.seed = j.value("seed", d.seed);
  c.decoding.seed = c.seed;
  if (j.contains("server")) {
    c.port = j.at("server").value("port", d.port);
    c.workers = j.at("server").value("workers", d.workers);
  }
  if (c.port < 0 || c.port > 65535) throw std::invalid_argument("server.port out of range");
  if (c.workers == 0) throw std::invalid_argument("server.workers must be positive");
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  try {
    return nlohmann::json::parse(in).get<PipelineConfig>();
  } catch (const std::exception& e) {
    throw ConfigError("invalid config file " + path.string() + ": " + e.what());
  }
}

void apply_env_overrides(PipelineConfig& c) {
  if (const char* port = std::getenv("VERVE_PORT"); port && *port) {
    try {
      std::size_t used = 0;
      const int p = std::stoi(port, &used);
      if (used != std::string(port).size() || p < 0 || p > 65535) throw std::out_of_range("port");
      c.port = p;
    } catch (const std::exception&) {
      throw ConfigError(std::string("VERVE_PORT is not a valid port: ") + port);
    }
  }
  if (const char* root = std::getenv("VERVE_CHECKPOINT_ROOT"); root && *root) c.checkpoint_root = root;
}

}  // namespace verve::interface
