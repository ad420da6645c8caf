#include "verve/interface/pipeline.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "verve/corpus/split.hpp"
#include "verve/corpus/synthetic.hpp"
#include "verve/paraphrase/paraphrase.hpp"

namespace verve::interface {

namespace fs = std::filesystem;

namespace {

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return nlohmann::json::parse(in);
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

nlohmann::json counts_json(const std::vector<corpus::Exchange>& data) {
  const auto c = corpus::count_labels(data);
  nlohmann::json j = {{"total", data.size()}, {"unlabeled", c.unlabeled}};
  for (const auto& [label, n] : c.by_label) j[std::string(corpus::to_string(label))] = n;
  return j;
}

bool has_checkpoint(const fs::path& dir) { return fs::exists(dir / "manifest.json"); }

template <typename Model>
std::shared_ptr<const Model> load_optional(const fs::path& dir, const char* what) {
  if (!has_checkpoint(dir)) return nullptr;
  try {
    return std::make_shared<const Model>(Model::load(dir));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot load ") + what + " checkpoint " + dir.string() + ": " + e.what());
  }
}

}  // namespace

// ---- data -------------------------------------------------------------------

nlohmann::json preprocess(const PreprocessOptions& opt, const fs::path& out) {
  fs::create_directories(out);
  const bool synthetic = !opt.pair.has_value();
  const auto pair = synthetic ? corpus::synthesize_pair() : corpus::load_pair(*opt.pair);
  const auto sp = corpus::split(pair, {}, opt.seed);

  fs::path annomi_csv;
  if (opt.annomi) {
    annomi_csv = *opt.annomi;
  } else {
    annomi_csv = out / "annomi_utterances.csv";
    corpus::write_synthetic_annomi_csv(annomi_csv, {});
  }
  const auto annomi = corpus::filter_annomi(corpus::flatten_annomi_csv(annomi_csv), opt.filter);

  std::map<std::string, std::string> refs;
  if (synthetic) {
    for (const auto& r : corpus::synthesize_references({})) refs.emplace(r.prompt, r.reflection);
  } else {
    for (const auto& ex : pair)
      if (ex.reflection_label == corpus::Reflection::CR) refs.emplace(ex.prompt, ex.response);
  }

  corpus::write_jsonl(out / "train.jsonl", sp.train);
  corpus::write_jsonl(out / "dev.jsonl", sp.dev);
  corpus::write_jsonl(out / "test.jsonl", sp.test);
  corpus::write_jsonl(out / "annomi.jsonl", annomi);
  {
    std::ofstream f(out / "references.jsonl");
    for (const auto& [p, r] : refs) f << nlohmann::json{{"prompt", p}, {"reference", r}}.dump() << '\n';
  }
  nlohmann::json stats = {{"seed", opt.seed},
                          {"pair_source", synthetic ? "synthetic" : opt.pair->string()},
                          {"train", counts_json(sp.train)},
                          {"dev", counts_json(sp.dev)},
                          {"test", counts_json(sp.test)},
                          {"annomi", counts_json(annomi)},
                          {"references", refs.size()}};
  write_json(out / "stats.json", stats);
  return stats;
}

DataDir load_data(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("data directory not found: " + dir.string());
  DataDir d;
  d.train = corpus::read_jsonl(dir / "train.jsonl");
  d.dev = corpus::read_jsonl(dir / "dev.jsonl");
  d.test = corpus::read_jsonl(dir / "test.jsonl");
  if (fs::exists(dir / "annomi.jsonl")) d.annomi = corpus::read_jsonl(dir / "annomi.jsonl");
  if (fs::exists(dir / "references.jsonl")) {
    std::ifstream in(dir / "references.jsonl");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      d.references.emplace(j.at("prompt").get<std::string>(), j.at("reference").get<std::string>());
    }
  }
  return d;
}

// ---- recipes ----------------------------------------------------------------

std::string_view to_string(TemplateSource s) {
  switch (s) {
    case TemplateSource::Attention: return "attention";
    case TemplateSource::Drg: return "drg";
    case TemplateSource::Tg: return "tg";
  }
  return "attention";
}

TemplateSource parse_template_source(std::string_view s) {
  if (s == "attention") return TemplateSource::Attention;
  if (s == "drg") return TemplateSource::Drg;
  if (s == "tg") return TemplateSource::Tg;
  throw std::invalid_argument("unknown template source '" + std::string(s) + "' (attention|drg|tg)");
}

void to_json(nlohmann::json& j, const GeneratorRecipe& r) {
  j = {{"model", r.model},
       {"source", to_string(r.source)},
       {"paraphrase", r.paraphrase},
       {"mix_original", r.mix_original},
       {"content_weight", r.content_weight},
       {"n_paraphrases", r.n_paraphrases},
       {"paraphraser", r.paraphraser},
       {"paraphraser_seed", r.paraphraser_seed}};
}

void from_json(const nlohmann::json& j, GeneratorRecipe& r) {
  const GeneratorRecipe d;
  r.model = j.contains("model") ? j.at("model").get<generator::GeneratorConfig>() : d.model;
  r.source = parse_template_source(j.value("source", std::string(to_string(d.source))));
  r.paraphrase = j.value("paraphrase", d.paraphrase);
  r.mix_original = j.value("mix_original", d.mix_original);
  r.content_weight = j.value("content_weight", d.content_weight);
  r.n_paraphrases = j.value("n_paraphrases", d.n_paraphrases);
  r.paraphraser = j.value("paraphraser", d.paraphraser);
  r.paraphraser_seed = j.value("paraphraser_seed", d.paraphraser_seed);
  if (r.n_paraphrases == 0) throw std::invalid_argument("n_paraphrases must be positive");
  if (!(r.content_weight > 0.0)) throw std::invalid_argument("content_weight must be positive");
}

void to_json(nlohmann::json& j, const TrainingConfig& c) {
  j = {{"discriminator", c.discriminator}, {"scorer", c.scorer}, {"coherence", c.coherence}, {"generator", c.generator}};
}

void from_json(const nlohmann::json& j, TrainingConfig& c) {
  const TrainingConfig d;
  c.discriminator = j.contains("discriminator") ? j.at("discriminator").get<reflection::ModelConfig>() : d.discriminator;
  c.scorer = j.contains("scorer") ? j.at("scorer").get<reflection::ModelConfig>() : d.scorer;
  c.coherence = j.contains("coherence") ? j.at("coherence").get<reflection::ModelConfig>() : d.coherence;
  c.generator = j.contains("generator") ? j.at("generator").get<GeneratorRecipe>() : d.generator;
}

TrainingConfig load_training_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  try {
    return nlohmann::json::parse(in).get<TrainingConfig>();
  } catch (const std::exception& e) {
    throw ConfigError("invalid config file " + path.string() + ": " + e.what());
  }
}

templating::SalienceTable salience_table(const std::vector<corpus::Exchange>& data) {
  std::vector<std::string> refl, nonrefl;
  for (const auto& ex : data) {
    if (!ex.reflection_label) continue;
    (corpus::is_reflection(*ex.reflection_label) ? refl : nonrefl).push_back(ex.response);
  }
  return templating::SalienceTable::build(refl, nonrefl);
}

namespace {

generator::ExtractorFn extractor_for(TemplateSource source, const reflection::Discriminator* disc,
                                     templating::SalienceTable table) {
  switch (source) {
    case TemplateSource::Attention:
      if (!disc) throw std::invalid_argument("attention templates need a discriminator");
      return rewriter::attention_extractor(*disc);
    case TemplateSource::Drg: return rewriter::drg_extractor(std::move(table));
    case TemplateSource::Tg: return rewriter::tg_extractor(std::move(table));
  }
  throw std::invalid_argument("unknown template source");
}

}  // namespace

generator::ExtractorFn training_extractor(TemplateSource source, const reflection::Discriminator* disc,
                                          const templating::SalienceTable& table) {
  return extractor_for(source, disc, table.swapped());
}

generator::ExtractorFn inference_extractor(TemplateSource source, const reflection::Discriminator* disc,
                                           const templating::SalienceTable& table) {
  return extractor_for(source, disc, table);
}

std::vector<generator::TrainingExample> generator_examples(const std::vector<corpus::Exchange>& data,
                                                           const GeneratorRecipe& recipe,
                                                           const generator::ExtractorFn& extractor) {
  const auto para = paraphrase::make_paraphraser(recipe.paraphraser, recipe.paraphraser_seed);
  std::vector<generator::TrainingExample> out;
  for (const auto& ex : data) {
    if (!ex.reflection_label || !corpus::is_reflection(*ex.reflection_label)) continue;
    if (!recipe.paraphrase || recipe.mix_original)
      out.push_back(generator::build_training_example(ex, false, extractor, recipe.content_weight, *para,
                                                      recipe.n_paraphrases));
    if (recipe.paraphrase)
      out.push_back(generator::build_training_example(ex, true, extractor, recipe.content_weight, *para,
                                                      recipe.n_paraphrases));
  }
  return out;
}

generator::GeneratorModel train_generator(const DataDir& data, const GeneratorRecipe& recipe,
                                          const reflection::Discriminator* disc, const fs::path& out,
                                          const Logger& log) {
  const auto table = salience_table(data.train);
  const auto extractor = training_extractor(recipe.source, disc, table);
  const auto train = generator_examples(data.train, recipe, extractor);
  GeneratorRecipe dev_recipe = recipe;
  dev_recipe.paraphrase = false;
  const auto dev = generator_examples(data.dev, dev_recipe, extractor);
  if (log) log("generator: " + std::to_string(train.size()) + " training / " + std::to_string(dev.size()) + " dev examples");
  std::vector<generator::EpochLoss> history;
  auto model = generator::GeneratorModel::train(train, dev, recipe.model, &history, [&](const generator::EpochLoss& e) {
    if (log) {
      std::ostringstream os;
      os << "generator epoch " << e.epoch << " train " << e.train_loss << " dev " << e.dev_loss;
      log(os.str());
    }
  });
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& e : history) hist.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"dev_loss", e.dev_loss}});
  fs::create_directories(out);
  model.save(out, {{"history", hist}, {"recipe", recipe}});
  write_json(out / "recipe.json", recipe);
  if (recipe.source != TemplateSource::Attention) write_json(out / "salience.json", table.to_json());
  return model;
}

LoadedGenerator load_generator(const fs::path& dir) {
  LoadedGenerator g;
  g.model = generator::GeneratorModel::load(dir);
  if (fs::exists(dir / "recipe.json")) g.recipe = read_json(dir / "recipe.json").get<GeneratorRecipe>();
  if (g.recipe.source != TemplateSource::Attention) {
    if (!fs::exists(dir / "salience.json")) throw std::runtime_error(dir.string() + ": missing salience.json");
    g.table = templating::SalienceTable::from_json(read_json(dir / "salience.json"));
  }
  return g;
}

void train_metric_models(const DataDir& data, const fs::path& out) {
  std::vector<std::string> texts;
  for (const auto& ex : data.train) texts.push_back(ex.response);
  fs::create_directories(out);
  write_json(out / "lm.json", metrics::NgramLM::train(texts).to_json());
  write_json(out / "idf.json", metrics::IdfTable::build(texts).to_json());
}

namespace {

reflection::EpochCallback epoch_logger(const Logger& log, const std::string& what) {
  return [log, what](const reflection::EpochLog& e) {
    if (!log) return;
    std::ostringstream os;
    os << what << " epoch " << e.epoch << " train " << e.train_loss << " dev " << e.dev_metric;
    log(os.str());
  };
}

nlohmann::json history_json(const std::vector<reflection::EpochLog>& history) {
  nlohmann::json h = nlohmann::json::array();
  for (const auto& e : history) h.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"dev_metric", e.dev_metric}});
  return h;
}

}  // namespace

nlohmann::json train_discriminator(const DataDir& data, const reflection::ModelConfig& cfg, const fs::path& out,
                                   const Logger& log) {
  std::vector<reflection::EpochLog> history;
  const auto d = reflection::Discriminator::train(data.train, data.dev, cfg, &history, epoch_logger(log, "discriminator"));
  nlohmann::json m = {{"test_accuracy", d.accuracy(data.test)}, {"dev_accuracy", d.accuracy(data.dev)},
                      {"history", history_json(history)}};
  d.save(out, m);
  return m;
}

nlohmann::json train_scorer(const DataDir& data, const reflection::ModelConfig& cfg, const fs::path& out,
                            const Logger& log) {
  std::vector<reflection::EpochLog> history;
  const auto s = reflection::Scorer::train(data.train, data.dev, cfg, &history, epoch_logger(log, "scorer"));
  nlohmann::json m = {{"test_mse", s.mean_squared_error(data.test)}, {"history", history_json(history)}};
  s.save(out, m);
  return m;
}

nlohmann::json train_coherence(const DataDir& data, const reflection::ModelConfig& cfg, const fs::path& out,
                               const Logger& log) {
  std::vector<reflection::EpochLog> history;
  const auto c = metrics::CoherenceModel::train(data.train, data.dev, cfg, &history, epoch_logger(log, "coherence"));
  double matched = 0.0, mismatched = 0.0;
  std::size_t n = 0;
  if (data.test.size() >= 2)
    for (const auto& p : metrics::shuffled_pairs(data.test, cfg.seed + 7)) {
      (p.related ? matched : mismatched) += c.coherence(p.prompt, p.response);
      n += p.related;
    }
  nlohmann::json m = {{"history", history_json(history)}};
  if (n) {
    m["test_matched_mean"] = matched / static_cast<double>(n);
    m["test_shuffled_mean"] = mismatched / static_cast<double>(n);
  }
  c.save(out, m);
  return m;
}

void train_all(const DataDir& data, const TrainingConfig& cfg, const fs::path& root,
               const std::vector<std::uint64_t>& seeds, const Logger& log, bool force) {
  auto need = [&](const fs::path& marker) {
    if (!force && fs::exists(marker)) {
      if (log) log("keeping " + marker.parent_path().string());
      return false;
    }
    return true;
  };
  if (need(root / "discriminator" / "manifest.json")) train_discriminator(data, cfg.discriminator, root / "discriminator", log);
  if (need(root / "scorer" / "manifest.json")) train_scorer(data, cfg.scorer, root / "scorer", log);
  if (need(root / "coherence" / "manifest.json")) train_coherence(data, cfg.coherence, root / "coherence", log);
  if (need(root / "metrics" / "lm.json")) train_metric_models(data, root / "metrics");
  const auto disc = reflection::Discriminator::load(root / "discriminator");
  for (auto seed : seeds)
    for (const char* kind : {"verve", "base", "drg", "tg"}) {
      const auto dir = generator_dir(root, seed, kind);
      if (!need(dir / "manifest.json")) continue;
      if (log) log(std::string("training ") + kind + " generator, seed " + std::to_string(seed));
      train_generator(data, recipe_for(kind, cfg.generator, seed), &disc, dir, log);
    }
}

// ---- systems ----------------------------------------------------------------

const std::vector<SystemSpec>& system_specs() {
  static const std::vector<SystemSpec> specs{{"verve", "verve", 5},     {"base", "base", 1}, {"adaptive", "base", 5},
                                             {"paraphrase", "verve", 1}, {"drg", "drg", 1},   {"tg", "tg", 1}};
  return specs;
}

const SystemSpec& system_spec(std::string_view name) {
  for (const auto& s : system_specs())
    if (s.name == name) return s;
  throw std::invalid_argument("unknown system '" + std::string(name) + "' (verve|base|adaptive|paraphrase|drg|tg)");
}

fs::path generator_dir(const fs::path& root, std::uint64_t seed, std::string_view generator) {
  return root / "generators" / ("seed-" + std::to_string(seed)) / std::string(generator);
}

GeneratorRecipe recipe_for(std::string_view generator, const GeneratorRecipe& base, std::uint64_t seed) {
  GeneratorRecipe r = base;
  r.model.seed = base.model.seed + seed;
  r.paraphraser_seed = base.paraphraser_seed + seed;
  if (generator == "verve") {
    r.source = TemplateSource::Attention;
    r.paraphrase = true;
  } else if (generator == "base") {
    r.source = TemplateSource::Attention;
    r.paraphrase = false;
  } else if (generator == "drg") {
    r.source = TemplateSource::Drg;
    r.paraphrase = false;
  } else if (generator == "tg") {
    r.source = TemplateSource::Tg;
    r.paraphrase = false;
  } else {
    throw std::invalid_argument("unknown generator '" + std::string(generator) + "' (verve|base|drg|tg)");
  }
  return r;
}

// ---- pipeline -----------------------------------------------------------------

Pipeline Pipeline::load(const PipelineConfig& cfg) {
  Pipeline p;
  p.cfg_ = cfg;
  p.disc_ = load_optional<reflection::Discriminator>(cfg.resolve(cfg.checkpoints.discriminator), "discriminator");
  p.scorer_ = load_optional<reflection::Scorer>(cfg.resolve(cfg.checkpoints.scorer), "scorer");
  const auto gen_dir = cfg.resolve(cfg.checkpoints.generator);
  if (has_checkpoint(gen_dir)) {
    try {
      p.gen_ = std::make_shared<const LoadedGenerator>(load_generator(gen_dir));
    } catch (const std::exception& e) {
      throw ConfigError("cannot load generator checkpoint " + gen_dir.string() + ": " + e.what());
    }
  }
  return p;
}

nlohmann::json Pipeline::health() const {
  return {{"status", "ok"},
          {"models", {{"discriminator", disc_ != nullptr}, {"scorer", scorer_ != nullptr}, {"generator", gen_ != nullptr}}}};
}

rewriter::RewriteResult Pipeline::rewrite(std::string_view prompt, std::string_view response,
                                          const RewriteOptions& opt) const {
  if (!can_rewrite()) throw ServiceUnavailable("rewriting needs the discriminator, scorer and generator");
  auto decoding = cfg_.decoding;
  if (opt.beams) decoding.beams = *opt.beams;
  if (opt.seed) decoding.seed = *opt.seed;
  auto loop = cfg_.loop;
  if (opt.max_attempts) loop.max_attempts = *opt.max_attempts;
  nlohmann::json check = loop;
  check.get<rewriter::LoopConfig>();
  rewriter::ModelBackend backend(inference_extractor(gen_->recipe.source, disc_.get(), gen_->table), gen_->model,
                                 *scorer_, decoding);
  return rewriter::rewrite(backend, prompt, response, loop);
}

reflection::ReflectionPrediction Pipeline::classify(std::string_view prompt, std::string_view response) const {
  if (!disc_) throw ServiceUnavailable("classification needs the discriminator");
  return disc_->classify(prompt, response);
}

double Pipeline::score(std::string_view prompt, std::string_view response) const {
  if (!scorer_) throw ServiceUnavailable("scoring needs the scorer");
  return scorer_->score(prompt, response);
}

// ---- evaluation -----------------------------------------------------------------

EvaluationModels load_evaluation_models(const fs::path& root) {
  EvaluationModels m;
  m.disc = load_optional<reflection::Discriminator>(root / "discriminator", "discriminator");
  m.scorer = load_optional<reflection::Scorer>(root / "scorer", "scorer");
  m.coherence = load_optional<metrics::CoherenceModel>(root / "coherence", "coherence");
  if (fs::exists(root / "metrics" / "lm.json"))
    m.lm = std::make_shared<const metrics::NgramLM>(metrics::NgramLM::from_json(read_json(root / "metrics" / "lm.json")));
  if (fs::exists(root / "metrics" / "idf.json"))
    m.idf =
        std::make_shared<const metrics::IdfTable>(metrics::IdfTable::from_json(read_json(root / "metrics" / "idf.json")));
  return m;
}

metrics::MetricReport evaluate_systems(const fs::path& model_root, const EvaluationModels& models,
                                       const EvaluationRun& run, const std::vector<corpus::Exchange>& data,
                                       const std::map<std::string, std::string>* references,
                                       std::map<std::string, rewriter::RewriteResult>* traces, const Logger& log) {
  if (!models.scorer) throw ServiceUnavailable("evaluation needs the scorer");
  // One generator per (seed, kind), shared by systems using it.
  auto cache = std::make_shared<std::map<fs::path, std::shared_ptr<const LoadedGenerator>>>();
  auto generator_for = [cache, model_root](std::uint64_t seed, const std::string& kind) {
    const auto dir = generator_dir(model_root, seed, kind);
    auto it = cache->find(dir);
    if (it != cache->end()) return it->second;
    std::shared_ptr<const LoadedGenerator> g;
    if (has_checkpoint(dir)) g = std::make_shared<const LoadedGenerator>(load_generator(dir));
    return (*cache)[dir] = g;
  };

  std::vector<metrics::System> systems;
  auto done = std::make_shared<std::size_t>(0);
  const std::size_t total = run.systems.size() * run.seeds.size() * data.size();
  for (const auto& name : run.systems) {
    const auto spec = system_spec(name);
    metrics::System sys;
    sys.name = spec.name;
    sys.rewrite = [=, &models, &run](const corpus::Exchange& ex, std::uint64_t seed) -> std::string {
      if (log && ++*done % 100 == 0) log("rewrites: " + std::to_string(*done) + " / " + std::to_string(total));
      const auto gen = generator_for(seed, spec.generator);
      if (!gen) throw ServiceUnavailable("no " + spec.generator + " generator for seed " + std::to_string(seed));
      auto loop = run.loop;
      loop.max_attempts = spec.attempts;
      rewriter::ModelBackend backend(inference_extractor(gen->recipe.source, models.disc.get(), gen->table), gen->model,
                                     *models.scorer, run.decoding);
      auto result = rewriter::rewrite(backend, ex.prompt, ex.response, loop);
      std::string out = result.final_text;
      if (traces) (*traces)[spec.name + "/" + std::to_string(seed) + "/" + ex.id] = std::move(result);
      return out;
    };
    systems.push_back(std::move(sys));
  }
  metrics::MetricModels mm;
  mm.scorer = models.scorer.get();
  mm.lm = models.lm.get();
  mm.coherence = models.coherence.get();
  mm.idf = models.idf.get();
  mm.references = references;
  metrics::EvaluateOptions opt;
  opt.seeds = run.seeds;
  return metrics::evaluate(systems, data, mm, opt);
}

}  // namespace verve::interface
