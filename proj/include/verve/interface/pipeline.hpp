#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "verve/corpus/annomi.hpp"
#include "verve/corpus/exchange.hpp"
#include "verve/generator/generator.hpp"
#include "verve/interface/config.hpp"
#include "verve/metrics/coherence.hpp"
#include "verve/metrics/language_model.hpp"
#include "verve/metrics/report.hpp"
#include "verve/metrics/specificity.hpp"
#include "verve/reflection/models.hpp"
#include "verve/rewriter/rewriter.hpp"
#include "verve/templating/template.hpp"

namespace verve::interface {

// ---- data directory -------------------------------------------------------
// <dir>/{train,dev,test}.jsonl (PAIR split), annomi.jsonl (filtered AnnoMI
// non-reflections), references.jsonl ({prompt, reference}) and stats.json.

struct PreprocessOptions {
  std::optional<std::filesystem::path> pair;    // PAIR JSONL; synthetic corpus when absent
  std::optional<std::filesystem::path> annomi;  // AnnoMI utterance CSV; synthetic table when absent
  std::uint64_t seed = 0;
  corpus::AnnomiFilter filter;
};

nlohmann::json preprocess(const PreprocessOptions& opt, const std::filesystem::path& out);

struct DataDir {
  std::vector<corpus::Exchange> train, dev, test, annomi;
  std::map<std::string, std::string> references;  // prompt -> expert complex reflection
};
DataDir load_data(const std::filesystem::path& dir);

// ---- training recipes -----------------------------------------------------

enum class TemplateSource { Attention, Drg, Tg };
std::string_view to_string(TemplateSource s);
TemplateSource parse_template_source(std::string_view s);

struct GeneratorRecipe {
  generator::GeneratorConfig model;
  TemplateSource source = TemplateSource::Attention;
  bool paraphrase = true;
  // With paraphrase on: keep the plain example next to each augmented one.
  bool mix_original = true;
  double content_weight = 1.0;
  std::size_t n_paraphrases = 5;
  std::string paraphraser = "lexical-v1";
  std::uint64_t paraphraser_seed = 1;
};
void to_json(nlohmann::json& j, const GeneratorRecipe& r);
void from_json(const nlohmann::json& j, GeneratorRecipe& r);

// Sections are optional; missing ones keep their defaults.
struct TrainingConfig {
  reflection::ModelConfig discriminator;
  reflection::ModelConfig scorer;
  reflection::ModelConfig coherence;
  GeneratorRecipe generator;
};
void to_json(nlohmann::json& j, const TrainingConfig& c);
void from_json(const nlohmann::json& j, TrainingConfig& c);
TrainingConfig load_training_config(const std::filesystem::path& path);

// Reflections (SR, CR) against non-reflections (NR) of a split.
templating::SalienceTable salience_table(const std::vector<corpus::Exchange>& data);

// Templates for generator training come from reflections, so DRG/TG delete
// reflection-marked n-grams there (swapped table) and non-reflection-marked
// ones at inference (table as built).
generator::ExtractorFn training_extractor(TemplateSource source, const reflection::Discriminator* disc,
                                          const templating::SalienceTable& table);
generator::ExtractorFn inference_extractor(TemplateSource source, const reflection::Discriminator* disc,
                                           const templating::SalienceTable& table);

std::vector<generator::TrainingExample> generator_examples(const std::vector<corpus::Exchange>& data,
                                                           const GeneratorRecipe& recipe,
                                                           const generator::ExtractorFn& extractor);

using Logger = std::function<void(const std::string&)>;

// Trains and saves a generator checkpoint; DRG/TG checkpoints also carry
// their salience table. `disc` is required for attention templates.
generator::GeneratorModel train_generator(const DataDir& data, const GeneratorRecipe& recipe,
                                          const reflection::Discriminator* disc, const std::filesystem::path& out,
                                          const Logger& log = {});

// A generator checkpoint together with the extractor it was trained for.
struct LoadedGenerator {
  generator::GeneratorModel model;
  GeneratorRecipe recipe;
  templating::SalienceTable table;
};
LoadedGenerator load_generator(const std::filesystem::path& dir);

// Language model and IDF statistics over the training responses.
void train_metric_models(const DataDir& data, const std::filesystem::path& out);

// Train on the train split, select on dev, save with test metrics in the
// manifest; return those metrics.
nlohmann::json train_discriminator(const DataDir& data, const reflection::ModelConfig& cfg,
                                   const std::filesystem::path& out, const Logger& log = {});
nlohmann::json train_scorer(const DataDir& data, const reflection::ModelConfig& cfg, const std::filesystem::path& out,
                            const Logger& log = {});
nlohmann::json train_coherence(const DataDir& data, const reflection::ModelConfig& cfg,
                               const std::filesystem::path& out, const Logger& log = {});

// ---- systems --------------------------------------------------------------
// Model layout under a root: discriminator/, scorer/, coherence/,
// metrics/{lm,idf}.json, generators/seed-<s>/<generator>/.

struct SystemSpec {
  std::string name;
  std::string generator;  // verve | base | drg | tg
  std::size_t attempts = 1;
};
// verve, base, adaptive, paraphrase, drg, tg.
const std::vector<SystemSpec>& system_specs();
const SystemSpec& system_spec(std::string_view name);
std::filesystem::path generator_dir(const std::filesystem::path& root, std::uint64_t seed, std::string_view generator);
GeneratorRecipe recipe_for(std::string_view generator, const GeneratorRecipe& base, std::uint64_t seed);

// Trains every artifact of the layout that is not already present (all of
// them with `force`), generators for each seed.
void train_all(const DataDir& data, const TrainingConfig& cfg, const std::filesystem::path& root,
               const std::vector<std::uint64_t>& seeds, const Logger& log = {}, bool force = false);

// ---- service-side pipeline ------------------------------------------------

struct RewriteOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_attempts;
  std::optional<std::size_t> beams;
};

class Pipeline {
 public:
  // Missing checkpoints leave the component unloaded (see health()); a
  // checkpoint that exists but does not load is a ConfigError.
  static Pipeline load(const PipelineConfig& cfg);

  bool can_rewrite() const { return disc_ && scorer_ && gen_; }
  bool can_score() const { return disc_ && scorer_; }
  nlohmann::json health() const;

  rewriter::RewriteResult rewrite(std::string_view prompt, std::string_view response,
                                  const RewriteOptions& opt = {}) const;
  reflection::ReflectionPrediction classify(std::string_view prompt, std::string_view response) const;
  double score(std::string_view prompt, std::string_view response) const;

  const PipelineConfig& config() const { return cfg_; }

 private:
  PipelineConfig cfg_;
  std::shared_ptr<const reflection::Discriminator> disc_;
  std::shared_ptr<const reflection::Scorer> scorer_;
  std::shared_ptr<const LoadedGenerator> gen_;
};

class ServiceUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- evaluation -----------------------------------------------------------

struct EvaluationModels {
  std::shared_ptr<const reflection::Discriminator> disc;
  std::shared_ptr<const reflection::Scorer> scorer;
  std::shared_ptr<const metrics::CoherenceModel> coherence;
  std::shared_ptr<const metrics::NgramLM> lm;
  std::shared_ptr<const metrics::IdfTable> idf;
};
// Loads whatever exists under the model root.
EvaluationModels load_evaluation_models(const std::filesystem::path& root);

struct EvaluationRun {
  std::vector<std::string> systems;
  std::vector<std::uint64_t> seeds;
  generator::GenerationConfig decoding;
  rewriter::LoopConfig loop;
};

// Rewrites every exchange under every system and seed. Systems whose
// generator is missing for a seed are skipped and listed in the report's
// failures. `traces`, when given, receives every RewriteResult keyed by
// system/seed/id.
metrics::MetricReport evaluate_systems(const std::filesystem::path& model_root, const EvaluationModels& models,
                                       const EvaluationRun& run, const std::vector<corpus::Exchange>& data,
                                       const std::map<std::string, std::string>* references,
                                       std::map<std::string, rewriter::RewriteResult>* traces = nullptr,
                                       const Logger& log = {});

}  // namespace verve::interface
