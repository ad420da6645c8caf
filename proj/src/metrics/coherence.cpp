#include "verve/metrics/coherence.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "verve/kernels/kernels.hpp"
#include "verve/text/tokenize.hpp"

namespace verve::metrics {

std::vector<RelatednessPair> shuffled_pairs(const std::vector<corpus::Exchange>& data, std::uint64_t seed) {
  std::vector<RelatednessPair> out;
  if (data.size() < 2) throw std::invalid_argument("coherence pairs need at least two exchanges");
  std::vector<std::size_t> perm(data.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  // Rotating the shuffled order by one gives a derangement.
  std::vector<std::size_t> other(data.size());
  for (std::size_t i = 0; i < perm.size(); ++i) other[perm[i]] = perm[(i + 1) % perm.size()];
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.push_back({data[i].prompt, data[i].response, true});
    out.push_back({data[i].prompt, data[other[i]].response, false});
  }
  return out;
}

CoherenceModel CoherenceModel::train(const std::vector<corpus::Exchange>& train, const std::vector<corpus::Exchange>& dev,
                                     const reflection::ModelConfig& cfg, std::vector<reflection::EpochLog>* log,
                                     const reflection::EpochCallback& on_epoch) {
  CoherenceModel m(reflection::EncoderClassifier(reflection::build_vocab(train, cfg.vocab_min_count), cfg, 2));
  auto samples_of = [&](const std::vector<corpus::Exchange>& data, std::uint64_t seed) {
    std::vector<reflection::Sample> out;
    if (data.size() < 2) return out;
    for (auto& p : shuffled_pairs(data, seed)) {
      reflection::Sample s;
      s.pair = m.model_.tokenize(p.prompt, p.response);
      s.label = p.related ? 1 : 0;
      out.push_back(std::move(s));
    }
    return out;
  };
  const auto samples = samples_of(train, cfg.seed);
  if (samples.empty()) throw std::invalid_argument("coherence training needs at least two exchanges");
  const auto dev_samples = samples_of(dev, cfg.seed + 1);
  auto metric = [&](const reflection::EncoderClassifier& model) {
    if (dev_samples.empty()) return 0.0;
    std::size_t ok = 0;
    for (const auto& s : dev_samples) {
      auto out = model.predict(s.pair);
      ok += (out[1] > out[0]) == (s.label == 1);
    }
    return static_cast<double>(ok) / static_cast<double>(dev_samples.size());
  };
  auto l = reflection::fit(m.model_, samples, reflection::Objective::Classify, metric, on_epoch);
  if (log) *log = std::move(l);
  return m;
}

double CoherenceModel::coherence(std::string_view prompt, std::string_view response) const {
  if (text::trim(prompt).empty() || text::trim(response).empty())
    throw std::invalid_argument("coherence needs a prompt and a response");
  auto logits = model_.predict(model_.tokenize(prompt, response));
  std::vector<float> p(logits.begin(), logits.end());
  kernels::softmax(p);
  return std::clamp(static_cast<double>(p[1]), 0.0, 1.0);
}

void CoherenceModel::save(const std::filesystem::path& dir, const nlohmann::json& metrics) const {
  model_.save(dir, kArchitecture, metrics);
}

CoherenceModel CoherenceModel::load(const std::filesystem::path& dir) {
  return CoherenceModel(reflection::EncoderClassifier::load(dir, kArchitecture));
}

}  // namespace verve::metrics
