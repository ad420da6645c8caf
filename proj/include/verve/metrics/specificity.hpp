#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace verve::metrics {

// Inverse document frequency over a document collection (one document per
// training response); idf = log(N / df), unseen words get log(N).
class IdfTable {
 public:
  static IdfTable build(const std::vector<std::string>& documents);
  double idf(const std::string& word) const;
  std::size_t documents() const { return n_docs_; }

  nlohmann::json to_json() const;
  static IdfTable from_json(const nlohmann::json& j);

 private:
  std::size_t n_docs_ = 0;
  std::unordered_map<std::string, std::size_t> df_;
};

struct RawSpecificity {
  double value = 0.0;       // mean IDF over content words
  bool degenerate = false;  // no content words
};

// Content words: alphabetic, not stopwords.
RawSpecificity raw_specificity(const IdfTable& idf, std::string_view response);

// Min-max normalization over the evaluated set; min -> 0, max -> 1, and 0.5
// for every value when the set is constant.
std::vector<double> normalize_min_max(const std::vector<double>& values);

}  // namespace verve::metrics
