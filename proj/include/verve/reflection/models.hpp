#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "verve/corpus/exchange.hpp"
#include "verve/reflection/encoder_classifier.hpp"
#include "verve/reflection/tokenized_pair.hpp"

namespace verve::reflection {

struct ReflectionPrediction {
  corpus::Reflection label = corpus::Reflection::NR;
  std::array<double, 3> probabilities{};  // indexed by Reflection value
  bool truncated = false;
};

// Token importance A over one tokenized pair. Scores are zero outside the
// response; mean_response_score is the mean over RESPONSE positions.
struct AttentionMap {
  std::vector<double> scores;
  double mean_response_score = 0.0;
  TokenizedPair source;
};

enum class QueryReduction { ClsRow, MeanOverQueries };

struct AttentionOptions {
  QueryReduction reduction = QueryReduction::ClsRow;
  // Encoder layer to read; default is the penultimate one.
  std::optional<std::size_t> layer;
};

// Core reduction, separated from the model for direct testing: each head's
// row is renormalized to sum to 1 over all positions, heads are max-pooled
// per position, PROMPT/SPECIAL positions are zeroed, and the mean over
// RESPONSE positions is taken.
AttentionMap attention_from_heads(TokenizedPair source, const std::vector<std::vector<double>>& head_rows);

class Discriminator {
 public:
  static constexpr const char* kArchitecture = "verve-discriminator-v1";

  Discriminator() = default;
  explicit Discriminator(EncoderClassifier model) : model_(std::move(model)) {}

  // Every exchange must carry a reflection label (std::invalid_argument
  // otherwise, before any training). Returns the best-dev-accuracy epoch.
  static Discriminator train(const std::vector<corpus::Exchange>& train, const std::vector<corpus::Exchange>& dev,
                             const ModelConfig& cfg, std::vector<EpochLog>* log = nullptr,
                             const EpochCallback& on_epoch = {});

  ReflectionPrediction classify(std::string_view prompt, std::string_view response) const;
  AttentionMap extract_attention(std::string_view prompt, std::string_view response,
                                 const AttentionOptions& opt = {}) const;
  double accuracy(const std::vector<corpus::Exchange>& data) const;

  void save(const std::filesystem::path& dir, const nlohmann::json& metrics = nlohmann::json::object()) const;
  static Discriminator load(const std::filesystem::path& dir);

  const EncoderClassifier& model() const { return model_; }

 private:
  EncoderClassifier model_;
};

// Regression onto NR -> 0, SR -> 0.5, CR -> 1 with outputs clamped to [0,1].
float scorer_target(corpus::Reflection r);

class Scorer {
 public:
  static constexpr const char* kArchitecture = "verve-scorer-v1";

  Scorer() = default;
  explicit Scorer(EncoderClassifier model) : model_(std::move(model)) {}

  static Scorer train(const std::vector<corpus::Exchange>& train, const std::vector<corpus::Exchange>& dev,
                      const ModelConfig& cfg, std::vector<EpochLog>* log = nullptr,
                      const EpochCallback& on_epoch = {});

  // Throws std::invalid_argument on a blank prompt or response.
  double score(std::string_view prompt, std::string_view response) const;
  double mean_squared_error(const std::vector<corpus::Exchange>& data) const;

  void save(const std::filesystem::path& dir, const nlohmann::json& metrics = nlohmann::json::object()) const;
  static Scorer load(const std::filesystem::path& dir);

  const EncoderClassifier& model() const { return model_; }

 private:
  EncoderClassifier model_;
};

}  // namespace verve::reflection
