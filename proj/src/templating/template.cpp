#include "verve/templating/template.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "verve/text/tokenize.hpp"

namespace verve::templating {

std::string_view to_string(Extractor e) {
  switch (e) {
    case Extractor::Attention:
      return "ATTENTION";
    case Extractor::Drg:
      return "DRG";
    case Extractor::Tg:
      return "TG";
  }
  return "ATTENTION";
}

Extractor parse_extractor(std::string_view s) {
  if (s == "ATTENTION") return Extractor::Attention;
  if (s == "DRG") return Extractor::Drg;
  if (s == "TG") return Extractor::Tg;
  throw std::invalid_argument("unknown extractor: " + std::string(s));
}

std::size_t Template::masked_count() const {
  return static_cast<std::size_t>(std::count(masked.begin(), masked.end(), true));
}

Template template_from_word_scores(std::vector<std::string> words, const std::vector<double>& word_scores,
                                   double mean_score, double content_weight) {
  if (!(content_weight > 0.0)) throw std::invalid_argument("content weight must be positive");
  if (word_scores.size() != words.size()) throw std::invalid_argument("one score per word required");
  Template t;
  t.words = std::move(words);
  t.content_weight = content_weight;
  t.extractor = Extractor::Attention;
  const double threshold = content_weight * mean_score;
  // Relative slack keeps "all scores equal the mean" masked despite rounding in the mean.
  const double slack = 1e-12 * std::max(1.0, std::abs(threshold));
  t.masked.resize(t.words.size());
  for (std::size_t i = 0; i < t.words.size(); ++i) t.masked[i] = word_scores[i] >= threshold - slack;
  t.noop = t.masked_count() == 0;
  return t;
}

Template make_template(const reflection::AttentionMap& attn, double content_weight) {
  const auto& src = attn.source;
  std::vector<double> word_scores(src.response_words.size(), -1.0);
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src.segment[i] != reflection::Segment::Response) continue;
    auto& w = word_scores.at(src.word[i]);
    w = std::max(w, attn.scores[i]);
  }
  // Words past a truncation point carry no score and stay unmasked.
  return template_from_word_scores(src.response_words, word_scores, attn.mean_response_score, content_weight);
}

std::string render_template(const Template& t, std::string_view sentinel) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < t.words.size(); ++i) {
    if (!t.masked[i]) {
      out.push_back(t.words[i]);
    } else if (i == 0 || !t.masked[i - 1]) {
      out.emplace_back(sentinel);
    }
  }
  return text::join(out);
}

nlohmann::json to_json(const Template& t) {
  return {{"words", t.words},
          {"masked", t.masked},
          {"content_weight", t.content_weight},
          {"extractor", to_string(t.extractor)},
          {"noop", t.noop}};
}

Template template_from_json(const nlohmann::json& j) {
  Template t;
  t.words = j.at("words").get<std::vector<std::string>>();
  t.masked = j.at("masked").get<std::vector<bool>>();
  if (t.masked.size() != t.words.size()) throw std::invalid_argument("template masked/words length mismatch");
  t.content_weight = j.at("content_weight").get<double>();
  t.extractor = parse_extractor(j.at("extractor").get<std::string>());
  t.noop = j.value("noop", t.masked_count() == 0);
  return t;
}

SalienceTable::SalienceTable(std::vector<std::size_t> orders, double lambda)
    : orders_(std::move(orders)), lambda_(lambda) {
  if (!(lambda_ > 0.0)) throw std::invalid_argument("salience smoothing must be positive");
  for (auto n : orders_)
    if (n == 0) throw std::invalid_argument("n-gram order must be positive");
}

SalienceTable SalienceTable::build(const std::vector<std::string>& reflections,
                                   const std::vector<std::string>& non_reflections, std::vector<std::size_t> orders,
                                   double lambda) {
  SalienceTable t(std::move(orders), lambda);
  for (const auto& r : reflections) t.add(text::words(r), true);
  for (const auto& r : non_reflections) t.add(text::words(r), false);
  return t;
}

void SalienceTable::add(const std::vector<std::string>& words, bool reflection) {
  for (auto n : orders_) {
    for (std::size_t i = 0; i + n <= words.size(); ++i) {
      std::vector<std::string> g(words.begin() + static_cast<std::ptrdiff_t>(i),
                                 words.begin() + static_cast<std::ptrdiff_t>(i + n));
      auto& c = counts_[text::join(g)];
      (reflection ? c.second : c.first) += 1;
    }
  }
}

std::size_t SalienceTable::count_nonrefl(const std::string& gram) const {
  auto it = counts_.find(gram);
  return it == counts_.end() ? 0 : it->second.first;
}

std::size_t SalienceTable::count_refl(const std::string& gram) const {
  auto it = counts_.find(gram);
  return it == counts_.end() ? 0 : it->second.second;
}

SalienceTable SalienceTable::swapped() const {
  SalienceTable t(orders_, lambda_);
  for (const auto& [g, c] : counts_) t.counts_[g] = {c.second, c.first};
  return t;
}

nlohmann::json SalienceTable::to_json() const {
  // Sorted for stable files.
  std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> rows(counts_.begin(), counts_.end());
  std::sort(rows.begin(), rows.end());
  nlohmann::json grams = nlohmann::json::array();
  for (const auto& [g, c] : rows) grams.push_back({g, c.first, c.second});
  return {{"orders", orders_}, {"lambda", lambda_}, {"grams", grams}};
}

SalienceTable SalienceTable::from_json(const nlohmann::json& j) {
  SalienceTable t(j.at("orders").get<std::vector<std::size_t>>(), j.at("lambda").get<double>());
  for (const auto& row : j.at("grams"))
    t.counts_[row.at(0).get<std::string>()] = {row.at(1).get<std::size_t>(), row.at(2).get<std::size_t>()};
  return t;
}

double ngram_salience(const std::string& gram, const SalienceTable& table) {
  const double n = static_cast<double>(table.count_nonrefl(gram));
  const double r = static_cast<double>(table.count_refl(gram));
  const double l = table.lambda();
  return (n + l) / (n + r + 2.0 * l);
}

double tg_salience(const std::string& gram, const SalienceTable& table, double gamma) {
  const double n = std::pow(static_cast<double>(table.count_nonrefl(gram)), gamma);
  const double r = std::pow(static_cast<double>(table.count_refl(gram)), gamma);
  const double l = table.lambda();
  return (n + l) / (n + r + 2.0 * l);
}

namespace {

template <class Accept>
Template mask_by_grams(std::string_view response, const SalienceTable& table, Extractor kind, Accept accept) {
  Template t;
  t.words = text::words(response);
  t.masked.assign(t.words.size(), false);
  t.extractor = kind;
  for (auto n : table.orders()) {
    for (std::size_t i = 0; i + n <= t.words.size(); ++i) {
      std::vector<std::string> g(t.words.begin() + static_cast<std::ptrdiff_t>(i),
                                 t.words.begin() + static_cast<std::ptrdiff_t>(i + n));
      if (!accept(text::join(g))) continue;
      for (std::size_t k = i; k < i + n; ++k) t.masked[k] = true;
    }
  }
  t.noop = t.masked_count() == 0;
  return t;
}

void check_unit_interval(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument(std::string(what) + " must lie in (0,1)");
}

}  // namespace

Template drg_extract(std::string_view response, const SalienceTable& table, double threshold) {
  check_unit_interval(threshold, "DRG threshold");
  return mask_by_grams(response, table, Extractor::Drg, [&](const std::string& g) {
    if (table.count_nonrefl(g) + table.count_refl(g) == 0) return false;
    return ngram_salience(g, table) >= threshold;
  });
}

Template tg_extract(std::string_view response, const SalienceTable& table, double gamma, double threshold) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("TG gamma must lie in (0,1]");
  check_unit_interval(threshold, "TG threshold");
  return mask_by_grams(response, table, Extractor::Tg, [&](const std::string& g) {
    if (table.count_nonrefl(g) == 0 || table.count_refl(g) == 0) return false;
    return tg_salience(g, table, gamma) >= threshold;
  });
}

}  // namespace verve::templating
