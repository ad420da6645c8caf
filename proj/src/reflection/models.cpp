#include "verve/reflection/models.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>
#include <stdexcept>

#include "verve/kernels/kernels.hpp"
#include "verve/text/tokenize.hpp"

namespace verve::reflection {

namespace {

void require_labels(const std::vector<corpus::Exchange>& data, const char* what) {
  for (const auto& e : data)
    if (!e.reflection_label) throw std::invalid_argument(std::string(what) + ": exchange " + e.id + " has no reflection label");
}

void check_label_variety(const std::vector<corpus::Exchange>& train, const ModelConfig& cfg) {
  std::set<corpus::Reflection> seen;
  for (const auto& e : train) seen.insert(*e.reflection_label);
  if (seen.size() >= 2) return;
  if (!cfg.allow_single_label) throw std::invalid_argument("training set contains a single reflection label");
  std::cerr << "warning: training set contains a single reflection label; the model will be degenerate\n";
}

void require_text(std::string_view prompt, std::string_view response) {
  if (text::trim(prompt).empty()) throw std::invalid_argument("prompt is empty");
  if (text::trim(response).empty()) throw std::invalid_argument("response is empty");
}

std::vector<Sample> make_samples(const EncoderClassifier& model, const std::vector<corpus::Exchange>& data) {
  std::vector<Sample> out;
  out.reserve(data.size());
  for (const auto& e : data) {
    Sample s;
    s.pair = model.tokenize(e.prompt, e.response);
    s.label = static_cast<int>(*e.reflection_label);
    s.target = scorer_target(*e.reflection_label);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

AttentionMap attention_from_heads(TokenizedPair source, const std::vector<std::vector<double>>& head_rows) {
  const std::size_t n = source.size();
  AttentionMap map;
  map.scores.assign(n, 0.0);
  for (const auto& row : head_rows) {
    if (row.size() != n) throw std::invalid_argument("head row length does not match the tokenized pair");
    double total = 0.0;
    for (double v : row) total += v;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = total > 0.0 ? row[i] / total : 1.0 / static_cast<double>(n);
      map.scores[i] = std::max(map.scores[i], v);
    }
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (source.segment[i] != Segment::Response) {
      map.scores[i] = 0.0;
    } else {
      sum += map.scores[i];
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("attention map has no response tokens");
  map.mean_response_score = sum / static_cast<double>(count);
  map.source = std::move(source);
  return map;
}

Discriminator Discriminator::train(const std::vector<corpus::Exchange>& train, const std::vector<corpus::Exchange>& dev,
                                   const ModelConfig& cfg, std::vector<EpochLog>* log, const EpochCallback& on_epoch) {
  require_labels(train, "discriminator training");
  require_labels(dev, "discriminator dev");
  check_label_variety(train, cfg);
  Discriminator d(EncoderClassifier(build_vocab(train, cfg.vocab_min_count), cfg, 3));
  auto samples = make_samples(d.model_, train);
  auto dev_samples = make_samples(d.model_, dev);
  auto metric = [&](const EncoderClassifier& m) {
    if (dev_samples.empty()) return 0.0;
    std::size_t ok = 0;
    for (const auto& s : dev_samples) {
      auto out = m.predict(s.pair);
      ok += static_cast<int>(std::max_element(out.begin(), out.end()) - out.begin()) == s.label;
    }
    return static_cast<double>(ok) / static_cast<double>(dev_samples.size());
  };
  auto l = fit(d.model_, samples, Objective::Classify, metric, on_epoch);
  if (log) *log = std::move(l);
  return d;
}

ReflectionPrediction Discriminator::classify(std::string_view prompt, std::string_view response) const {
  require_text(prompt, response);
  const auto pair = model_.tokenize(prompt, response);
  auto logits = model_.predict(pair);
  std::vector<float> probs(logits.begin(), logits.end());
  kernels::softmax(probs);
  ReflectionPrediction p;
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) total += probs[i];
  for (std::size_t i = 0; i < 3; ++i) p.probabilities[i] = probs[i] / total;
  p.label = static_cast<corpus::Reflection>(std::max_element(p.probabilities.begin(), p.probabilities.end()) -
                                            p.probabilities.begin());
  p.truncated = pair.truncated;
  return p;
}

AttentionMap Discriminator::extract_attention(std::string_view prompt, std::string_view response,
                                              const AttentionOptions& opt) const {
  require_text(prompt, response);
  auto pair = model_.tokenize(prompt, response);
  std::vector<nn::AttentionRecord> records;
  model_.predict(pair, &records);
  const std::size_t layers = records.size();
  const std::size_t layer = opt.layer.value_or(layers >= 2 ? layers - 2 : 0);
  if (layer >= layers) throw std::out_of_range("attention layer out of range");
  const auto& rec = records[layer];
  const std::size_t n = pair.size();
  std::vector<std::vector<double>> rows;
  for (const auto& P : rec.probs.at(0)) {
    std::vector<double> row(n, 0.0);
    if (opt.reduction == QueryReduction::ClsRow) {
      for (std::size_t j = 0; j < n; ++j) row[j] = P(0, j);
    } else {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) row[j] += P(i, j) / static_cast<double>(n);
    }
    rows.push_back(std::move(row));
  }
  return attention_from_heads(std::move(pair), rows);
}

double Discriminator::accuracy(const std::vector<corpus::Exchange>& data) const {
  require_labels(data, "accuracy");
  if (data.empty()) return 0.0;
  std::size_t ok = 0;
  for (const auto& e : data) ok += classify(e.prompt, e.response).label == *e.reflection_label;
  return static_cast<double>(ok) / static_cast<double>(data.size());
}

void Discriminator::save(const std::filesystem::path& dir, const nlohmann::json& metrics) const {
  model_.save(dir, kArchitecture, metrics);
}

Discriminator Discriminator::load(const std::filesystem::path& dir) {
  return Discriminator(EncoderClassifier::load(dir, kArchitecture));
}

float scorer_target(corpus::Reflection r) {
  switch (r) {
    case corpus::Reflection::NR:
      return 0.0f;
    case corpus::Reflection::SR:
      return 0.5f;
    case corpus::Reflection::CR:
      return 1.0f;
  }
  return 0.0f;
}

Scorer Scorer::train(const std::vector<corpus::Exchange>& train, const std::vector<corpus::Exchange>& dev,
                     const ModelConfig& cfg, std::vector<EpochLog>* log, const EpochCallback& on_epoch) {
  require_labels(train, "scorer training");
  require_labels(dev, "scorer dev");
  check_label_variety(train, cfg);
  Scorer s(EncoderClassifier(build_vocab(train, cfg.vocab_min_count), cfg, 1));
  auto samples = make_samples(s.model_, train);
  auto dev_samples = make_samples(s.model_, dev);
  auto metric = [&](const EncoderClassifier& m) {
    if (dev_samples.empty()) return 0.0;
    double se = 0.0;
    for (const auto& smp : dev_samples) {
      const double v = std::clamp(static_cast<double>(m.predict(smp.pair)[0]), 0.0, 1.0);
      se += (v - smp.target) * (v - smp.target);
    }
    return -se / static_cast<double>(dev_samples.size());
  };
  auto l = fit(s.model_, samples, Objective::Regress, metric, on_epoch);
  if (log) *log = std::move(l);
  return s;
}

double Scorer::score(std::string_view prompt, std::string_view response) const {
  require_text(prompt, response);
  const double v = model_.predict(model_.tokenize(prompt, response))[0];
  if (!std::isfinite(v)) return 0.0;
  return std::clamp(v, 0.0, 1.0);
}

double Scorer::mean_squared_error(const std::vector<corpus::Exchange>& data) const {
  require_labels(data, "mean_squared_error");
  if (data.empty()) return 0.0;
  double se = 0.0;
  for (const auto& e : data) {
    const double d = score(e.prompt, e.response) - scorer_target(*e.reflection_label);
    se += d * d;
  }
  return se / static_cast<double>(data.size());
}

void Scorer::save(const std::filesystem::path& dir, const nlohmann::json& metrics) const {
  model_.save(dir, kArchitecture, metrics);
}

Scorer Scorer::load(const std::filesystem::path& dir) { return Scorer(EncoderClassifier::load(dir, kArchitecture)); }

}  // namespace verve::reflection
