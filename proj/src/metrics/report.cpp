#include "verve/metrics/report.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "verve/metrics/keyphrase.hpp"
#include "verve/metrics/similarity.hpp"
#include "verve/metrics/ter.hpp"
#include "verve/text/tokenize.hpp"

namespace verve::metrics {

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

Interval bootstrap(const std::vector<double>& v, std::size_t resamples, std::uint64_t seed, double level) {
  if (v.empty()) throw std::invalid_argument("bootstrap of an empty sample");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must lie in (0,1)");
  Interval out;
  out.mean = mean_of(v);
  if (resamples == 0) {
    out.lower = out.upper = out.mean;
    return out;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[pick(rng)];
    m = s / static_cast<double>(v.size());
  }
  std::sort(means.begin(), means.end());
  out.lower = quantile(means, (1.0 - level) / 2.0);
  out.upper = quantile(means, 1.0 - (1.0 - level) / 2.0);
  return out;
}

std::string label_of(const corpus::Exchange& ex) {
  return ex.reflection_label ? std::string(corpus::to_string(*ex.reflection_label)) : "none";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double change_in_reflection(const reflection::Scorer& scorer, std::string_view prompt, std::string_view original,
                            std::string_view rewrite) {
  return scorer.score(prompt, rewrite) - scorer.score(prompt, original);
}

Interval bootstrap_mean(const std::vector<double>& values, std::size_t resamples, std::uint64_t seed, double level) {
  return bootstrap(values, resamples, seed, level);
}

Interval paired_bootstrap(const std::vector<double>& a, const std::vector<double>& b, std::size_t resamples,
                          std::uint64_t seed, double level) {
  if (a.size() != b.size()) throw std::invalid_argument("paired bootstrap needs equal-length samples");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return bootstrap(d, resamples, seed, level);
}

const Aggregate* MetricReport::find(std::string_view system, std::string_view metric, std::string_view group,
                                    std::string_view value) const {
  for (const auto& a : aggregates)
    if (a.system == system && a.metric == metric && a.group == group && a.value == value) return &a;
  return nullptr;
}

std::vector<double> MetricReport::values(std::string_view system, std::string_view metric) const {
  std::vector<const ExampleRecord*> rows;
  for (const auto& r : records)
    if (r.system == system && r.values.count(std::string(metric))) rows.push_back(&r);
  std::stable_sort(rows.begin(), rows.end(), [](const ExampleRecord* x, const ExampleRecord* y) {
    return std::tie(x->seed, x->exchange.id) < std::tie(y->seed, y->exchange.id);
  });
  std::vector<double> out;
  for (const auto* r : rows) out.push_back(r->values.at(std::string(metric)));
  return out;
}

ExampleRecord score_rewrite(const MetricModels& models, const corpus::Exchange& ex, std::string rewrite) {
  ExampleRecord rec;
  rec.exchange = ex;
  rec.rewrite = std::move(rewrite);
  auto& v = rec.values;
  if (models.scorer) v[kChangeInReflection] = change_in_reflection(*models.scorer, ex.prompt, ex.response, rec.rewrite);
  const auto cov = keyphrase_coverage(ex.response, rec.rewrite);
  v[kKeyphraseCoverage] = cov.value;
  if (cov.degenerate) rec.flags.push_back(std::string(kKeyphraseCoverage) + ":degenerate");
  v[kEditRate] = ter(ex.response, rec.rewrite);
  const bool has_words = !text::words(rec.rewrite).empty();
  if (models.lm && has_words) v[kPerplexity] = models.lm->perplexity(rec.rewrite);
  if (models.coherence && has_words) v[kCoherence] = models.coherence->coherence(ex.prompt, rec.rewrite);
  if (models.idf) {
    const auto s = raw_specificity(*models.idf, rec.rewrite);
    v[kSpecificity] = s.value;
    if (s.degenerate) rec.flags.push_back(std::string(kSpecificity) + ":degenerate");
  }
  if (models.references) {
    const auto it = models.references->find(ex.prompt);
    if (it != models.references->end()) {
      v[kBleu] = sentence_bleu(rec.rewrite, it->second);
      v[kMeteor] = meteor(rec.rewrite, it->second);
    }
  }
  return rec;
}

MetricReport aggregate(std::vector<ExampleRecord> records, const MetricModels& models, const EvaluateOptions& opt) {
  MetricReport rep;
  if (!models.scorer) rep.omitted.push_back(kChangeInReflection);
  if (!models.lm) rep.omitted.push_back(kPerplexity);
  if (!models.coherence) rep.omitted.push_back(kCoherence);
  if (!models.idf) rep.omitted.push_back(kSpecificity);
  if (!models.references) {
    rep.omitted.push_back(kBleu);
    rep.omitted.push_back(kMeteor);
  }

  // Specificity: min-max over every non-degenerate rewrite in the report; degenerate ones are 0.
  std::vector<double> raw;
  std::vector<double*> slots;
  for (auto& r : records) {
    const auto it = r.values.find(kSpecificity);
    if (it == r.values.end()) continue;
    const bool degenerate =
        std::find(r.flags.begin(), r.flags.end(), std::string(kSpecificity) + ":degenerate") != r.flags.end();
    if (degenerate) {
      it->second = 0.0;
      continue;
    }
    raw.push_back(it->second);
    slots.push_back(&it->second);
  }
  const auto norm = normalize_min_max(raw);
  for (std::size_t i = 0; i < slots.size(); ++i) *slots[i] = norm[i];

  rep.records = std::move(records);

  // (system, group, value, metric) -> values in record order.
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::vector<double>> buckets;
  for (const auto& r : rep.records) {
    const std::vector<std::pair<std::string, std::string>> groups{
        {"all", "all"},
        {"dataset", std::string(corpus::to_string(r.exchange.dataset))},
        {"reflection_label", label_of(r.exchange)},
        {"behavior_label", r.exchange.behavior_label.value_or("none")},
        {"seed", std::to_string(r.seed)}};
    for (const auto& [metric, value] : r.values)
      for (const auto& [g, gv] : groups) buckets[{r.system, g, gv, metric}].push_back(value);
  }
  for (const auto& [key, vals] : buckets) {
    Aggregate a;
    std::tie(a.system, a.group, a.value, a.metric) = key;
    a.n = vals.size();
    a.interval = bootstrap(vals, opt.resamples, opt.bootstrap_seed, 0.95);
    rep.aggregates.push_back(std::move(a));
  }
  return rep;
}

MetricReport evaluate(const std::vector<System>& systems, const std::vector<corpus::Exchange>& data,
                      const MetricModels& models, const EvaluateOptions& opt) {
  std::vector<ExampleRecord> records;
  std::vector<Failure> failures;
  for (const auto& sys : systems)
    for (auto seed : opt.seeds)
      for (const auto& ex : data) {
        std::string out;
        try {
          out = sys.rewrite(ex, seed);
        } catch (const std::exception& e) {
          failures.push_back({sys.name, ex.id, seed, e.what()});
          continue;
        }
        auto rec = score_rewrite(models, ex, std::move(out));
        rec.system = sys.name;
        rec.seed = seed;
        records.push_back(std::move(rec));
      }
  auto rep = aggregate(std::move(records), models, opt);
  rep.failures = std::move(failures);
  return rep;
}

nlohmann::json to_json(const MetricReport& report) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : report.records)
    records.push_back({{"system", r.system},
                       {"seed", r.seed},
                       {"exchange", corpus::to_json(r.exchange)},
                       {"rewrite", r.rewrite},
                       {"values", r.values},
                       {"flags", r.flags}});
  nlohmann::json aggregates = nlohmann::json::array();
  for (const auto& a : report.aggregates)
    aggregates.push_back({{"system", a.system},
                          {"group", a.group},
                          {"value", a.value},
                          {"metric", a.metric},
                          {"n", a.n},
                          {"mean", a.interval.mean},
                          {"ci_lower", a.interval.lower},
                          {"ci_upper", a.interval.upper}});
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : report.failures)
    failures.push_back({{"system", f.system}, {"id", f.id}, {"seed", f.seed}, {"message", f.message}});
  return {{"records", records}, {"aggregates", aggregates}, {"failures", failures}, {"omitted", report.omitted}};
}

std::string records_csv(const MetricReport& report) {
  const std::vector<std::string> metrics{kChangeInReflection, kKeyphraseCoverage, kEditRate, kPerplexity,
                                         kCoherence,          kSpecificity,       kBleu,     kMeteor};
  std::ostringstream os;
  os << "system,seed,id,dataset,reflection_label,behavior_label,rewrite";
  for (const auto& m : metrics) os << ',' << m;
  os << '\n';
  for (const auto& r : report.records) {
    os << csv_field(r.system) << ',' << r.seed << ',' << csv_field(r.exchange.id) << ','
       << corpus::to_string(r.exchange.dataset) << ',' << label_of(r.exchange) << ','
       << csv_field(r.exchange.behavior_label.value_or("")) << ',' << csv_field(r.rewrite);
    for (const auto& m : metrics) {
      os << ',';
      const auto it = r.values.find(m);
      if (it != r.values.end()) os << number(it->second);
    }
    os << '\n';
  }
  return os.str();
}

std::string aggregates_csv(const MetricReport& report) {
  std::ostringstream os;
  os << "system,group,value,metric,n,mean,ci_lower,ci_upper\n";
  for (const auto& a : report.aggregates)
    os << csv_field(a.system) << ',' << a.group << ',' << csv_field(a.value) << ',' << a.metric << ',' << a.n << ','
       << number(a.interval.mean) << ',' << number(a.interval.lower) << ',' << number(a.interval.upper) << '\n';
  return os.str();
}

}  // namespace verve::metrics
