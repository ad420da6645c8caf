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
#include "verve/nn/graph.hpp"
#include "verve/nn/tensor.hpp"
#include "verve/nn/transformer.hpp"
#include "verve/reflection/tokenized_pair.hpp"
#include "verve/text/wordpiece.hpp"

namespace verve::reflection {

// Architecture and training knobs shared by the discriminator, the scorer and
// the coherence classifier.
struct ModelConfig {
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t d_ff = 128;
  std::size_t layers = 2;
  std::size_t max_len = 128;
  float dropout = 0.1f;

  std::size_t epochs = 8;
  std::size_t batch_size = 16;
  float lr = 1e-3f;
  float weight_decay = 0.01f;
  std::size_t warmup_steps = 50;
  std::uint64_t seed = 1;
  std::size_t vocab_min_count = 2;
  // Training on a single label is an error unless this is set (then a warning).
  bool allow_single_label = false;
};

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

nn::TransformerConfig transformer_config(const ModelConfig& c, std::size_t vocab_size);

// Subword vocabulary over the prompts and responses of a training split.
text::WordPiece build_vocab(const std::vector<corpus::Exchange>& data, std::size_t min_count);

// Transformer encoder over "[CLS] prompt [SEP] response [SEP]" with a tanh
// pooler on the [CLS] row and a linear head of `outputs` units.
class EncoderClassifier {
 public:
  EncoderClassifier() = default;
  EncoderClassifier(text::WordPiece vocab, const ModelConfig& cfg, std::size_t outputs);

  TokenizedPair tokenize(std::string_view prompt, std::string_view response) const;

  // [batch, outputs] head values. `dropout_rng` enables dropout (training).
  nn::Var forward(nn::Graph& g, const std::vector<const TokenizedPair*>& batch, nn::Rng* dropout_rng,
                  std::vector<nn::AttentionRecord>* records = nullptr) const;
  std::vector<float> predict(const TokenizedPair& pair, std::vector<nn::AttentionRecord>* records = nullptr) const;

  void save(const std::filesystem::path& dir, const std::string& architecture,
            const nlohmann::json& metrics) const;
  static EncoderClassifier load(const std::filesystem::path& dir, const std::string& architecture);

  const ModelConfig& config() const { return cfg_; }
  const text::WordPiece& vocab() const { return vocab_; }
  std::size_t outputs() const { return outputs_; }
  nn::ParameterStore& params() { return store_; }
  const nn::ParameterStore& params() const { return store_; }

 private:
  text::WordPiece vocab_;
  ModelConfig cfg_;
  std::size_t outputs_ = 0;
  // Read-only outside training; Graph::param needs a mutable reference.
  mutable nn::ParameterStore store_;
};

struct Sample {
  TokenizedPair pair;
  int label = -1;       // class index (classification)
  float target = 0.0f;  // regression target
};

enum class Objective { Classify, Regress };

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double dev_metric = 0.0;
};

// Higher is better; evaluated after every epoch, best epoch's weights kept.
using DevMetric = std::function<double(const EncoderClassifier&)>;
using EpochCallback = std::function<void(const EpochLog&)>;

std::vector<EpochLog> fit(EncoderClassifier& model, const std::vector<Sample>& train, Objective objective,
                          const DevMetric& dev_metric, const EpochCallback& on_epoch = {});

}  // namespace verve::reflection
