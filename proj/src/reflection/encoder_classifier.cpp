#include "verve/reflection/encoder_classifier.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "verve/nn/checkpoint.hpp"
#include "verve/text/tokenize.hpp"

namespace verve::reflection {

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = nlohmann::json{{"d_model", c.d_model},       {"heads", c.heads},
                     {"d_ff", c.d_ff},             {"layers", c.layers},
                     {"max_len", c.max_len},       {"dropout", c.dropout},
                     {"epochs", c.epochs},         {"batch_size", c.batch_size},
                     {"lr", c.lr},                 {"weight_decay", c.weight_decay},
                     {"warmup_steps", c.warmup_steps}, {"seed", c.seed},
                     {"vocab_min_count", c.vocab_min_count},
                     {"allow_single_label", c.allow_single_label}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  const ModelConfig d;
  c.d_model = j.value("d_model", d.d_model);
  c.heads = j.value("heads", d.heads);
  c.d_ff = j.value("d_ff", d.d_ff);
  c.layers = j.value("layers", d.layers);
  c.max_len = j.value("max_len", d.max_len);
  c.dropout = j.value("dropout", d.dropout);
  c.epochs = j.value("epochs", d.epochs);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.lr = j.value("lr", d.lr);
  c.weight_decay = j.value("weight_decay", d.weight_decay);
  c.warmup_steps = j.value("warmup_steps", d.warmup_steps);
  c.seed = j.value("seed", d.seed);
  c.vocab_min_count = j.value("vocab_min_count", d.vocab_min_count);
  c.allow_single_label = j.value("allow_single_label", d.allow_single_label);
  if (c.heads == 0 || c.d_model % c.heads != 0) throw std::invalid_argument("d_model must be divisible by heads");
  if (c.batch_size == 0) throw std::invalid_argument("batch_size must be positive");
}

nn::TransformerConfig transformer_config(const ModelConfig& c, std::size_t vocab_size) {
  nn::TransformerConfig t;
  t.vocab = vocab_size;
  t.d_model = c.d_model;
  t.heads = c.heads;
  t.d_ff = c.d_ff;
  t.layers = c.layers;
  t.max_len = c.max_len;
  t.type_vocab = 3;
  t.dropout = c.dropout;
  return t;
}

text::WordPiece build_vocab(const std::vector<corpus::Exchange>& data, std::size_t min_count) {
  std::vector<std::vector<std::string>> sentences;
  sentences.reserve(2 * data.size());
  for (const auto& e : data) {
    sentences.push_back(text::words(e.prompt));
    sentences.push_back(text::words(e.response));
  }
  text::WordPiece::Options opt;
  opt.min_word_count = min_count;
  return text::WordPiece::build(sentences, opt);
}

EncoderClassifier::EncoderClassifier(text::WordPiece vocab, const ModelConfig& cfg, std::size_t outputs)
    : vocab_(std::move(vocab)), cfg_(cfg), outputs_(outputs) {
  nn::Rng rng(cfg.seed);
  const auto tc = transformer_config(cfg_, vocab_.size());
  nn::init_embeddings(store_, "emb", tc, rng);
  nn::init_encoder(store_, "enc", tc, rng);
  nn::init_linear(store_, "pool", cfg.d_model, cfg.d_model, rng);
  nn::init_linear(store_, "head", cfg.d_model, outputs, rng);
}

TokenizedPair EncoderClassifier::tokenize(std::string_view prompt, std::string_view response) const {
  return tokenize_pair(vocab_, prompt, response, cfg_.max_len);
}

nn::Var EncoderClassifier::forward(nn::Graph& g, const std::vector<const TokenizedPair*>& batch,
                                   nn::Rng* dropout_rng, std::vector<nn::AttentionRecord>* records) const {
  nn::Packed packed;
  for (const auto* p : batch) {
    std::vector<std::size_t> ids(p->tokens.begin(), p->tokens.end());
    std::vector<std::size_t> types;
    for (auto s : p->segment) types.push_back(static_cast<std::size_t>(s));
    packed.add(ids, types);
  }
  const auto tc = transformer_config(cfg_, vocab_.size());
  nn::Var x = nn::embed(g, store_, "emb", packed);
  if (dropout_rng) x = g.dropout(x, cfg_.dropout, *dropout_rng);
  nn::Var h = nn::encoder(g, store_, "enc", tc, x, packed.self_segments(), dropout_rng, records);
  nn::Var cls = g.gather_rows(h, packed.offsets);
  nn::Var pooled = g.tanh(nn::linear(g, store_, "pool", cls));
  if (dropout_rng) pooled = g.dropout(pooled, cfg_.dropout, *dropout_rng);
  return nn::linear(g, store_, "head", pooled);
}

std::vector<float> EncoderClassifier::predict(const TokenizedPair& pair,
                                              std::vector<nn::AttentionRecord>* records) const {
  nn::Graph g(false);
  nn::Var out = forward(g, {&pair}, nullptr, records);
  const auto row = g.value(out).row(0);
  return {row.begin(), row.end()};
}

void EncoderClassifier::save(const std::filesystem::path& dir, const std::string& architecture,
                             const nlohmann::json& metrics) const {
  nn::Manifest m;
  m.architecture = architecture;
  m.config = nlohmann::json(cfg_);
  m.config["outputs"] = outputs_;
  m.metrics = metrics;
  nn::write_manifest(dir, m);
  vocab_.save(dir / "vocab.txt");
  store_.save(dir / "weights.bin");
}

EncoderClassifier EncoderClassifier::load(const std::filesystem::path& dir, const std::string& architecture) {
  const auto m = nn::read_manifest(dir, architecture);
  ModelConfig cfg = m.config.get<ModelConfig>();
  EncoderClassifier model(text::WordPiece::load(dir / "vocab.txt"), cfg, m.config.at("outputs").get<std::size_t>());
  model.store_.load(dir / "weights.bin");
  return model;
}

std::vector<EpochLog> fit(EncoderClassifier& model, const std::vector<Sample>& train, Objective objective,
                          const DevMetric& dev_metric, const EpochCallback& on_epoch) {
  if (train.empty()) throw std::invalid_argument("empty training set");
  const auto& cfg = model.config();
  nn::Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const std::size_t steps_per_epoch = (train.size() + cfg.batch_size - 1) / cfg.batch_size;
  nn::AdamConfig ac;
  ac.lr = cfg.lr;
  ac.weight_decay = cfg.weight_decay;
  ac.warmup_steps = cfg.warmup_steps;
  ac.total_steps = steps_per_epoch * cfg.epochs;
  nn::Adam opt(ac);

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<EpochLog> log;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<nn::Matrix> best_values;
  auto params = model.params().all();
  model.params().zero_grad();

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    double loss_sum = 0.0;
    for (std::size_t s = 0; s < order.size(); s += cfg.batch_size) {
      std::vector<const TokenizedPair*> batch;
      std::vector<int> labels;
      std::vector<float> targets;
      for (std::size_t k = s; k < std::min(order.size(), s + cfg.batch_size); ++k) {
        const auto& smp = train[order[k]];
        batch.push_back(&smp.pair);
        labels.push_back(smp.label);
        targets.push_back(smp.target);
      }
      nn::Graph g;
      nn::Var out = model.forward(g, batch, &rng);
      nn::Var loss = objective == Objective::Classify ? g.cross_entropy(out, labels) : g.mse(out, targets);
      loss_sum += g.value(loss).data[0] * static_cast<double>(batch.size());
      g.backward(loss);
      opt.step(model.params());
    }
    EpochLog e{epoch, loss_sum / static_cast<double>(train.size()), dev_metric ? dev_metric(model) : 0.0};
    log.push_back(e);
    if (on_epoch) on_epoch(e);
    if (!dev_metric || e.dev_metric > best) {
      best = e.dev_metric;
      best_values.clear();
      for (auto* p : params) best_values.push_back(p->value);
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_values[i];
  return log;
}

}  // namespace verve::reflection
