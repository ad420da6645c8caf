#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "verve/corpus/exchange.hpp"
#include "verve/nn/tensor.hpp"
#include "verve/nn/transformer.hpp"
#include "verve/paraphrase/paraphrase.hpp"
#include "verve/templating/template.hpp"
#include "verve/text/wordpiece.hpp"

namespace verve::generator {

// Literal separator between prompt and template in input_text; encoded as the
// vocabulary's native [SEP] token.
inline constexpr std::string_view kSeparator = "[SEP]";

struct TrainingExample {
  std::string input_text;   // "prompt [SEP] rendered template"
  std::string target_text;  // the original reflection
  bool augmented = false;   // template came from a paraphrase
};

std::string make_input(std::string_view prompt, std::string_view rendered_template);
// Splits input_text at its only separator; throws std::invalid_argument when
// there is not exactly one.
std::pair<std::string, std::string> split_input(std::string_view input_text);

// Template extractor for a (prompt, response) pair at content weight C.
using ExtractorFn = std::function<templating::Template(std::string_view prompt, std::string_view response, double c)>;

// Target is always ex.response. With use_paraphrase the template is
// extracted from the most distant paraphrase instead of the response itself.
// Throws std::invalid_argument for unlabeled or NR exchanges.
TrainingExample build_training_example(const corpus::Exchange& ex, bool use_paraphrase, const ExtractorFn& extractor,
                                       double content_weight, const paraphrase::Paraphraser& paraphraser,
                                       std::size_t n_paraphrases = 5);

// Throws std::invalid_argument when an example is malformed (separator count,
// empty target).
void validate(const TrainingExample& ex);

struct GeneratorConfig {
  std::size_t d_model = 96;
  std::size_t heads = 4;
  std::size_t d_ff = 192;
  std::size_t layers = 2;
  std::size_t max_source_len = 192;
  std::size_t max_target_len = 128;
  float dropout = 0.1f;
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  float lr = 2e-3f;
  float weight_decay = 0.01f;
  std::size_t warmup_steps = 100;
  std::uint64_t seed = 1;
  std::size_t vocab_min_count = 1;
};

void to_json(nlohmann::json& j, const GeneratorConfig& c);
void from_json(const nlohmann::json& j, GeneratorConfig& c);

struct GenerationConfig {
  std::size_t beams = 5;
  std::size_t max_length = 128;  // decoder tokens, end token included
  float length_penalty = 1.0f;   // beam score = log-prob / length^penalty
  std::uint64_t seed = 0;        // decoding is deterministic; kept for API stability
};

struct EpochLoss {
  std::size_t epoch = 0;  // 0 = before training
  double train_loss = 0.0;
  double dev_loss = 0.0;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GeneratorModel {
 public:
  static constexpr const char* kArchitecture = "verve-generator-v1";

  GeneratorModel() = default;
  GeneratorModel(text::WordPiece vocab, const GeneratorConfig& cfg);

  // Best-dev-loss checkpoint; dev may be empty (then the last epoch is kept).
  static GeneratorModel train(const std::vector<TrainingExample>& train, const std::vector<TrainingExample>& dev,
                              const GeneratorConfig& cfg, std::vector<EpochLoss>* log = nullptr,
                              const std::function<void(const EpochLoss&)>& on_epoch = {});

  // Mean per-token cross-entropy of targets under teacher forcing.
  double loss(const std::vector<TrainingExample>& data) const;

  // Decodes a response for "prompt [SEP] template". Empty beam output is
  // retried once greedily; a second empty result throws GenerationError.
  std::string fill(std::string_view prompt, const templating::Template& tmpl, const GenerationConfig& gen = {}) const;
  std::string fill_input(std::string_view input_text, const GenerationConfig& gen) const;

  // Encoder/decoder token ids as used in training.
  std::vector<std::size_t> source_ids(std::string_view input_text) const;
  std::vector<std::size_t> target_ids(std::string_view target_text) const;  // ends with EOS

  // Next-token log-probabilities after each prefix position, computed by the
  // full graph (row t conditions on BOS + prefix[0..t)) and by the cached
  // incremental decoder. Used to check the two paths agree.
  nn::Matrix graph_log_probs(const std::vector<std::size_t>& source, const std::vector<std::size_t>& prefix) const;
  nn::Matrix incremental_log_probs(const std::vector<std::size_t>& source,
                                   const std::vector<std::size_t>& prefix) const;

  void save(const std::filesystem::path& dir, const nlohmann::json& metrics = nlohmann::json::object()) const;
  static GeneratorModel load(const std::filesystem::path& dir);

  const GeneratorConfig& config() const { return cfg_; }
  const text::WordPiece& vocab() const { return vocab_; }
  const nn::ParameterStore& params() const { return store_; }

 private:
  nn::TransformerConfig net_config() const;
  nn::Var forward_loss(nn::Graph& g, const std::vector<const TrainingExample*>& batch, nn::Rng* dropout_rng) const;
  std::vector<std::size_t> beam_search(const std::vector<std::size_t>& source, std::size_t beams,
                                       std::size_t max_length, float length_penalty) const;

  text::WordPiece vocab_;
  GeneratorConfig cfg_;
  mutable nn::ParameterStore store_;
};

}  // namespace verve::generator
