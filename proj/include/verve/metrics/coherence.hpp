#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "verve/corpus/exchange.hpp"
#include "verve/reflection/encoder_classifier.hpp"

namespace verve::metrics {

// Binary prompt/response relatedness classifier: gold pairs against pairs
// whose response is drawn from another exchange of the same split.
class CoherenceModel {
 public:
  static constexpr const char* kArchitecture = "verve-coherence-v1";

  CoherenceModel() = default;
  explicit CoherenceModel(reflection::EncoderClassifier model) : model_(std::move(model)) {}

  static CoherenceModel train(const std::vector<corpus::Exchange>& train, const std::vector<corpus::Exchange>& dev,
                              const reflection::ModelConfig& cfg, std::vector<reflection::EpochLog>* log = nullptr,
                              const reflection::EpochCallback& on_epoch = {});

  // Probability that `response` is the real continuation of `prompt`.
  double coherence(std::string_view prompt, std::string_view response) const;

  void save(const std::filesystem::path& dir, const nlohmann::json& metrics = nlohmann::json::object()) const;
  static CoherenceModel load(const std::filesystem::path& dir);

 private:
  reflection::EncoderClassifier model_;
};

// (prompt, response, related) pairs: every exchange once as a positive, and
// once with a response from a different prompt (derangement seeded by `seed`).
struct RelatednessPair {
  std::string prompt;
  std::string response;
  bool related = false;
};
std::vector<RelatednessPair> shuffled_pairs(const std::vector<corpus::Exchange>& data, std::uint64_t seed);

}  // namespace verve::metrics
