#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace verve::metrics {

// Interpolated Kneser-Ney word n-gram model. Unknown words map to <unk>,
// which only receives mass from the uniform base distribution.
class NgramLM {
 public:
  static NgramLM train(const std::vector<std::string>& texts, std::size_t order = 3, double discount = 0.75);

  // Natural-log probability of `word` after `history` (most recent last).
  double log_prob(const std::vector<std::string>& history, const std::string& word) const;
  // exp(mean NLL) over the words of `text`, each conditioned on the padded
  // history before it. Throws std::invalid_argument on text with no words.
  double perplexity(std::string_view text) const;

  std::size_t order() const { return order_; }
  std::size_t vocab_size() const { return vocab_size_; }

  nlohmann::json to_json() const;
  static NgramLM from_json(const nlohmann::json& j);

 private:
  double prob(std::size_t n, const std::vector<std::string>& ctx, std::size_t begin, const std::string& w) const;

  std::size_t order_ = 3;
  double discount_ = 0.75;
  std::size_t vocab_size_ = 0;
  std::unordered_map<std::string, std::size_t> vocab_;
  // counts_[n]: raw counts for n == order, continuation counts below.
  std::vector<std::unordered_map<std::string, double>> counts_;
  std::vector<std::unordered_map<std::string, double>> ctx_total_;
  std::vector<std::unordered_map<std::string, double>> ctx_types_;
};

}  // namespace verve::metrics
