#include "verve/metrics/specificity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "verve/text/lexicon.hpp"
#include "verve/text/tokenize.hpp"

namespace verve::metrics {

namespace {

bool content_word(const std::string& w) {
  if (text::is_stopword(w)) return false;
  return std::all_of(w.begin(), w.end(), [](unsigned char c) { return std::isalpha(c) || c == '\''; }) &&
         std::any_of(w.begin(), w.end(), [](unsigned char c) { return std::isalpha(c); });
}

}  // namespace

IdfTable IdfTable::build(const std::vector<std::string>& documents) {
  IdfTable t;
  for (const auto& d : documents) {
    const auto w = text::words(d);
    std::set<std::string> uniq(w.begin(), w.end());
    for (const auto& x : uniq) ++t.df_[x];
    ++t.n_docs_;
  }
  return t;
}

double IdfTable::idf(const std::string& word) const {
  if (n_docs_ == 0) return 0.0;
  const auto it = df_.find(word);
  const double df = it == df_.end() ? 1.0 : static_cast<double>(it->second);
  return std::log(static_cast<double>(n_docs_) / df);
}

nlohmann::json IdfTable::to_json() const {
  std::vector<std::pair<std::string, std::size_t>> rows(df_.begin(), df_.end());
  std::sort(rows.begin(), rows.end());
  return {{"documents", n_docs_}, {"df", rows}};
}

IdfTable IdfTable::from_json(const nlohmann::json& j) {
  IdfTable t;
  t.n_docs_ = j.at("documents").get<std::size_t>();
  for (const auto& row : j.at("df")) t.df_[row.at(0).get<std::string>()] = row.at(1).get<std::size_t>();
  return t;
}

RawSpecificity raw_specificity(const IdfTable& idf, std::string_view response) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& w : text::words(response)) {
    if (!content_word(w)) continue;
    sum += idf.idf(w);
    ++n;
  }
  if (n == 0) return {0.0, true};
  return {sum / static_cast<double>(n), false};
}

std::vector<double> normalize_min_max(const std::vector<double>& values) {
  if (values.empty()) return {};
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(*hi > *lo ? (v - *lo) / (*hi - *lo) : 0.5);
  return out;
}

}  // namespace verve::metrics
