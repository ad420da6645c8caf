#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "verve/generator/generator.hpp"
#include "verve/reflection/models.hpp"
#include "verve/templating/template.hpp"

namespace verve::rewriter {

enum class StopReason { Improved, BudgetExhausted, NoopTemplate };
std::string_view to_string(StopReason r);

// What the early-stop threshold is compared against.
//  Improvement: attempt score - original score (default)
//  InterAttempt: attempt score - previous attempt score (original for the first)
enum class StopRule { Improvement, InterAttempt };
std::string_view to_string(StopRule r);
StopRule parse_stop_rule(std::string_view s);

struct LoopConfig {
  double base_weight = 1.0;
  double step = 0.1;
  std::size_t max_attempts = 5;
  double threshold = 0.2;
  StopRule rule = StopRule::Improvement;
};

void to_json(nlohmann::json& j, const LoopConfig& c);
void from_json(const nlohmann::json& j, LoopConfig& c);

// C for attempt k (0-based), rounded to 1e-9 so 1.0 - 3*0.1 prints as 0.7.
double content_weight_at(const LoopConfig& cfg, std::size_t k);

struct RewriteAttempt {
  double content_weight = 1.0;
  templating::Template tmpl;
  std::string candidate;
  double score = 0.0;
};

struct RewriteResult {
  double original_score = 0.0;
  std::vector<RewriteAttempt> attempts;
  std::string final_text;
  double final_score = 0.0;
  double improvement = 0.0;
  StopReason stopped_reason = StopReason::BudgetExhausted;
};

// Rendered templates use `sentinel` for masked runs.
nlohmann::json to_json(const RewriteResult& r, std::string_view sentinel = templating::kDefaultMask);

// The three model calls the loop needs. Implementations must be read-only so
// concurrent rewrites can share one instance.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual templating::Template make_template(std::string_view prompt, std::string_view response,
                                             double content_weight) const = 0;
  virtual std::string fill(std::string_view prompt, const templating::Template& tmpl) const = 0;
  virtual double score(std::string_view prompt, std::string_view response) const = 0;
};

// Model errors re-thrown with the attempt they happened in.
class RewriteError : public std::runtime_error {
 public:
  RewriteError(const std::string& what, double content_weight)
      : std::runtime_error(what), content_weight_(content_weight) {}
  double content_weight() const { return content_weight_; }

 private:
  double content_weight_;
};

// Template -> fill -> score at one C. A no-op template skips the generator and
// returns the response itself as the candidate.
RewriteAttempt rewrite_once(const Backend& backend, std::string_view prompt, std::string_view response,
                            double content_weight);

// Adaptive loop: attempts at C = base, base - step, ... until the stop rule
// fires or the budget is spent. The final text is the best-scoring attempt
// (earliest on ties), or the original response when no attempt beats it.
RewriteResult rewrite(const Backend& backend, std::string_view prompt, std::string_view response,
                      const LoopConfig& cfg = {});
// Same loop given an already computed original score.
RewriteResult rewrite(const Backend& backend, std::string_view prompt, std::string_view response,
                      double original_score, const LoopConfig& cfg);

// Template extractors over the trained models / salience tables.
generator::ExtractorFn attention_extractor(const reflection::Discriminator& disc,
                                           reflection::AttentionOptions opt = {});
generator::ExtractorFn drg_extractor(templating::SalienceTable table, double threshold = templating::kDrgThreshold);
generator::ExtractorFn tg_extractor(templating::SalienceTable table, double gamma = templating::kTgGamma,
                                    double threshold = templating::kTgThreshold);

// Backend over trained models. The referenced models must outlive it.
class ModelBackend final : public Backend {
 public:
  ModelBackend(generator::ExtractorFn extractor, const generator::GeneratorModel& gen, const reflection::Scorer& scorer,
               generator::GenerationConfig decoding = {})
      : extractor_(std::move(extractor)), gen_(gen), scorer_(scorer), decoding_(decoding) {}

  templating::Template make_template(std::string_view prompt, std::string_view response,
                                     double content_weight) const override;
  std::string fill(std::string_view prompt, const templating::Template& tmpl) const override;
  double score(std::string_view prompt, std::string_view response) const override;

 private:
  generator::ExtractorFn extractor_;
  const generator::GeneratorModel& gen_;
  const reflection::Scorer& scorer_;
  generator::GenerationConfig decoding_;
};

}  // namespace verve::rewriter
