#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "verve/reflection/models.hpp"

namespace verve::templating {

inline constexpr std::string_view kDefaultMask = "<mask>";

enum class Extractor { Attention, Drg, Tg };

std::string_view to_string(Extractor e);
Extractor parse_extractor(std::string_view s);

// Normalized response words with per-word mask flags. `noop` is set when
// nothing is masked; the rewriter then returns the original response.
struct Template {
  std::vector<std::string> words;
  std::vector<bool> masked;
  double content_weight = 1.0;
  Extractor extractor = Extractor::Attention;
  bool noop = false;

  std::size_t masked_count() const;
  bool operator==(const Template&) const = default;
};

// Masks word w iff any of its subword tokens has A_i >= C * mean_response_score.
// Throws std::invalid_argument when C <= 0.
Template make_template(const reflection::AttentionMap& attn, double content_weight);

// Same rule over per-word scores (max over each word's subwords), exposed for
// direct testing and for callers that already lifted scores to words.
Template template_from_word_scores(std::vector<std::string> words, const std::vector<double>& word_scores,
                                   double mean_score, double content_weight);

// Runs of masked words collapse to one sentinel; unmasked words are kept verbatim.
std::string render_template(const Template& t, std::string_view sentinel = kDefaultMask);

nlohmann::json to_json(const Template& t);
Template template_from_json(const nlohmann::json& j);

// 1..3-gram counts in the reflection and the non-reflection corpus.
class SalienceTable {
 public:
  SalienceTable() = default;
  SalienceTable(std::vector<std::size_t> orders, double lambda);

  static SalienceTable build(const std::vector<std::string>& reflections,
                             const std::vector<std::string>& non_reflections,
                             std::vector<std::size_t> orders = {1, 2, 3}, double lambda = 1.0);

  void add(const std::vector<std::string>& words, bool reflection);
  std::size_t count_nonrefl(const std::string& gram) const;
  std::size_t count_refl(const std::string& gram) const;
  bool empty() const { return counts_.empty(); }
  double lambda() const { return lambda_; }
  const std::vector<std::size_t>& orders() const { return orders_; }
  // Same table with the two corpora exchanged.
  SalienceTable swapped() const;

  nlohmann::json to_json() const;
  static SalienceTable from_json(const nlohmann::json& j);

 private:
  std::vector<std::size_t> orders_{1, 2, 3};
  double lambda_ = 1.0;
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> counts_;  // (nonrefl, refl)
};

// (n + lambda) / (n + r + 2 lambda); n/r are the non-reflection/reflection counts.
double ngram_salience(const std::string& gram, const SalienceTable& table);
// Counts raised to gamma before smoothing.
double tg_salience(const std::string& gram, const SalienceTable& table, double gamma);

inline constexpr double kDrgThreshold = 0.3;
inline constexpr double kTgGamma = 0.75;
inline constexpr double kTgThreshold = 0.5;

// Candidates are grams seen in either corpus.
Template drg_extract(std::string_view response, const SalienceTable& table, double threshold = kDrgThreshold);
// Candidates are grams seen in both corpora.
Template tg_extract(std::string_view response, const SalienceTable& table, double gamma = kTgGamma,
                    double threshold = kTgThreshold);

}  // namespace verve::templating
