#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "verve/corpus/exchange.hpp"
#include "verve/metrics/coherence.hpp"
#include "verve/metrics/language_model.hpp"
#include "verve/metrics/specificity.hpp"
#include "verve/reflection/models.hpp"

namespace verve::metrics {

// score(prompt, rewrite) - score(prompt, original).
double change_in_reflection(const reflection::Scorer& scorer, std::string_view prompt, std::string_view original,
                            std::string_view rewrite);

struct Interval {
  double mean = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// Percentile bootstrap of the mean.
Interval bootstrap_mean(const std::vector<double>& values, std::size_t resamples = 1000, std::uint64_t seed = 0,
                        double level = 0.95);
// Bootstrap of mean(a - b) with examples resampled jointly.
Interval paired_bootstrap(const std::vector<double>& a, const std::vector<double>& b, std::size_t resamples = 1000,
                          std::uint64_t seed = 0, double level = 0.95);

inline constexpr const char* kChangeInReflection = "change_in_reflection";
inline constexpr const char* kKeyphraseCoverage = "keyphrase_coverage";
inline constexpr const char* kEditRate = "edit_rate";
inline constexpr const char* kPerplexity = "perplexity";
inline constexpr const char* kCoherence = "coherence";
inline constexpr const char* kSpecificity = "specificity";
inline constexpr const char* kBleu = "bleu";
inline constexpr const char* kMeteor = "meteor";

// Models behind the metrics; a null entry omits the metrics that need it.
struct MetricModels {
  const reflection::Scorer* scorer = nullptr;
  const NgramLM* lm = nullptr;
  const CoherenceModel* coherence = nullptr;
  const IdfTable* idf = nullptr;
  // prompt -> expert reference reflection, for BLEU and METEOR.
  const std::map<std::string, std::string>* references = nullptr;
};

struct ExampleRecord {
  std::string system;
  std::uint64_t seed = 0;
  corpus::Exchange exchange;
  std::string rewrite;
  std::map<std::string, double> values;
  std::vector<std::string> flags;  // "<metric>:degenerate"
};

struct Aggregate {
  std::string system;
  std::string group;  // "all", "dataset", "reflection_label", "behavior_label", "seed"
  std::string value;
  std::string metric;
  std::size_t n = 0;
  Interval interval;
};

struct Failure {
  std::string system;
  std::string id;
  std::uint64_t seed = 0;
  std::string message;
};

struct MetricReport {
  std::vector<ExampleRecord> records;
  std::vector<Aggregate> aggregates;
  std::vector<Failure> failures;
  std::vector<std::string> omitted;  // metrics skipped for lack of a model

  const Aggregate* find(std::string_view system, std::string_view metric, std::string_view group = "all",
                        std::string_view value = "all") const;
  // Per-example values of one metric for one system, ordered by (seed, exchange id).
  std::vector<double> values(std::string_view system, std::string_view metric) const;
};

using RewriteFn = std::function<std::string(const corpus::Exchange&, std::uint64_t seed)>;

struct System {
  std::string name;
  RewriteFn rewrite;
};

struct EvaluateOptions {
  std::vector<std::uint64_t> seeds{0};
  std::size_t resamples = 1000;
  std::uint64_t bootstrap_seed = 0;
};

// Computes every available metric for one rewrite; specificity is left raw
// (normalization needs the whole evaluated set).
ExampleRecord score_rewrite(const MetricModels& models, const corpus::Exchange& ex, std::string rewrite);

// Normalizes specificity over all records jointly and builds the aggregates.
MetricReport aggregate(std::vector<ExampleRecord> records, const MetricModels& models, const EvaluateOptions& opt = {});

MetricReport evaluate(const std::vector<System>& systems, const std::vector<corpus::Exchange>& data,
                      const MetricModels& models, const EvaluateOptions& opt = {});

nlohmann::json to_json(const MetricReport& report);
std::string records_csv(const MetricReport& report);
std::string aggregates_csv(const MetricReport& report);

}  // namespace verve::metrics
