#include "verve/interface/cli.hpp"

#include <atomic>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>
#include <sstream>

#include "CLI11.hpp"
#include "verve/interface/pipeline.hpp"
#include "verve/interface/service.hpp"
#include "verve/text/tokenize.hpp"

namespace verve::interface {

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_shutdown{false};

void on_signal(int) {
  g_shutdown = true;
}

class CliError : public std::runtime_error {
 public:
  CliError(std::string code, const std::string& message) : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

PipelineConfig pipeline_config(const std::string& path) {
  PipelineConfig cfg = path.empty() ? PipelineConfig{} : load_config(path);
  apply_env_overrides(cfg);
  return cfg;
}

TrainingConfig training_config(const std::string& path) {
  return path.empty() ? TrainingConfig{} : load_training_config(path);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!text::trim(item).empty()) out.emplace_back(text::trim(item));
  return out;
}

std::vector<std::uint64_t> seed_range(std::size_t n) {
  std::vector<std::uint64_t> seeds(n);
  for (std::size_t i = 0; i < n; ++i) seeds[i] = i;
  return seeds;
}

void print_summary(std::ostream& out, const metrics::MetricReport& rep, const std::vector<std::string>& systems) {
  const std::vector<std::string> cols{metrics::kChangeInReflection, metrics::kKeyphraseCoverage, metrics::kEditRate,
                                      metrics::kPerplexity,         metrics::kCoherence,         metrics::kSpecificity,
                                      metrics::kBleu,               metrics::kMeteor};
  out << std::left << std::setw(12) << "system";
  for (const auto& c : cols) out << std::setw(22) << c;
  out << '\n';
  for (const auto& s : systems) {
    out << std::setw(12) << s;
    for (const auto& c : cols) {
      const auto* a = rep.find(s, c);
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(3);
      if (a)
        cell << a->interval.mean << " [" << a->interval.lower << "," << a->interval.upper << "]";
      else
        cell << "-";
      out << std::setw(22) << cell.str();
    }
    out << '\n';
  }
}

}  // namespace

void request_shutdown() { g_shutdown = true; }

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counselor response rewriting: training, rewriting, evaluation and serving.", "verve"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::function<void()> action;
  auto logger = [&err](const std::string& line) { err << line << std::endl; };

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "Build train/dev/test splits and the filtered AnnoMI set");
  std::string pair_path, annomi_path, pre_out;
  std::uint64_t pre_seed = 0;
  pre->add_option("--pair", pair_path, "PAIR JSONL file (synthetic corpus when omitted)")->check(CLI::ExistingFile);
  pre->add_option("--annomi", annomi_path, "AnnoMI utterance CSV (synthetic table when omitted)")->check(CLI::ExistingFile);
  pre->add_option("--out", pre_out, "Output data directory")->required();
  pre->add_option("--seed", pre_seed, "Split seed");
  pre->callback([&] {
    action = [&] {
      PreprocessOptions opt;
      if (!pair_path.empty()) opt.pair = pair_path;
      if (!annomi_path.empty()) opt.annomi = annomi_path;
      opt.seed = pre_seed;
      out << preprocess(opt, pre_out).dump(2) << '\n';
    };
  });

  // train
  auto* train = app.add_subcommand("train", "Train a model");
  std::string what, data_dir, train_cfg, train_out, paraphrase = "on", extractor = "attention", disc_dir;
  std::uint64_t gen_seed = 0;
  std::size_t n_seeds = 1;
  bool force = false;
  train->add_option("model", what, "discriminator|scorer|coherence|generator|metrics|all")
      ->required()
      ->check(CLI::IsMember({"discriminator", "scorer", "coherence", "generator", "metrics", "all"}));
  train->add_option("--data", data_dir, "Data directory written by preprocess")->required();
  train->add_option("--config", train_cfg, "Training config (JSON)");
  train->add_option("--out", train_out, "Checkpoint directory (model root for 'all')")->required();
  train->add_option("--paraphrase", paraphrase, "Paraphrase-augmented generator training")
      ->check(CLI::IsMember({"on", "off"}));
  train->add_option("--extractor", extractor, "Generator templates: attention|drg|tg")
      ->check(CLI::IsMember({"attention", "drg", "tg"}));
  train->add_option("--discriminator", disc_dir, "Discriminator checkpoint for attention templates");
  train->add_option("--seed", gen_seed, "Generator seed offset");
  train->add_option("--seeds", n_seeds, "Generator seeds for 'all'")->check(CLI::PositiveNumber);
  train->add_flag("--force", force, "Retrain artifacts that already exist ('all')");
  train->callback([&] {
    action = [&] {
      const auto cfg = training_config(train_cfg);
      const auto data = load_data(data_dir);
      nlohmann::json result;
      if (what == "discriminator") {
        result = train_discriminator(data, cfg.discriminator, train_out, logger);
      } else if (what == "scorer") {
        result = train_scorer(data, cfg.scorer, train_out, logger);
      } else if (what == "coherence") {
        result = train_coherence(data, cfg.coherence, train_out, logger);
      } else if (what == "metrics") {
        train_metric_models(data, train_out);
        result = {{"written", {(fs::path(train_out) / "lm.json").string(), (fs::path(train_out) / "idf.json").string()}}};
      } else if (what == "generator") {
        auto recipe = cfg.generator;
        recipe.source = parse_template_source(extractor);
        recipe.paraphrase = paraphrase == "on";
        recipe.model.seed += gen_seed;
        recipe.paraphraser_seed += gen_seed;
        std::optional<reflection::Discriminator> disc;
        if (recipe.source == TemplateSource::Attention) {
          if (disc_dir.empty()) throw CliError("usage", "attention templates need --discriminator <dir>");
          disc = reflection::Discriminator::load(disc_dir);
        }
        train_generator(data, recipe, disc ? &*disc : nullptr, train_out, logger);
        result = {{"out", train_out}, {"recipe", recipe}};
      } else {
        train_all(data, cfg, train_out, seed_range(n_seeds), logger, force);
        result = {{"root", train_out}, {"seeds", n_seeds}};
      }
      out << result.dump(2) << '\n';
    };
  });

  // rewrite
  auto* rw = app.add_subcommand("rewrite", "Rewrite one response and print the result with its attempt trace");
  std::string rw_cfg, prompt, response;
  std::size_t max_attempts = 0, beams = 0;
  rw->add_option("--config", rw_cfg, "Pipeline config (JSON)");
  rw->add_option("--prompt", prompt, "Client prompt")->required();
  rw->add_option("--response", response, "Counselor response")->required();
  rw->add_option("--max-attempts", max_attempts, "Override the attempt budget");
  rw->add_option("--beams", beams, "Override the beam count");
  rw->callback([&] {
    action = [&] {
      const auto cfg = pipeline_config(rw_cfg);
      const auto p = Pipeline::load(cfg);
      RewriteOptions opt;
      if (max_attempts) opt.max_attempts = max_attempts;
      if (beams) opt.beams = beams;
      if (text::trim(prompt).empty() || text::trim(response).empty())
        throw CliError("invalid_input", "prompt and response must not be empty");
      out << rewriter::to_json(p.rewrite(prompt, response, opt), cfg.mask).dump(2) << '\n';
    };
  });

  // score
  auto* sc = app.add_subcommand("score", "Classify and score one response");
  std::string sc_cfg, sc_prompt, sc_response;
  sc->add_option("--config", sc_cfg, "Pipeline config (JSON)");
  sc->add_option("--prompt", sc_prompt, "Client prompt")->required();
  sc->add_option("--response", sc_response, "Counselor response")->required();
  sc->callback([&] {
    action = [&] {
      const auto p = Pipeline::load(pipeline_config(sc_cfg));
      const auto r = handle_score(p, nlohmann::json{{"prompt", sc_prompt}, {"response", sc_response}}.dump());
      if (r.status != 200) throw CliError(r.body.at("code"), r.body.at("message"));
      out << r.body.dump(2) << '\n';
    };
  });

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Rewrite a test set under several systems and report metrics");
  std::string systems = "verve,base,drg,tg", ev_data, ev_models = "models", ev_out, ev_cfg, split = "test",
              labels = "NR,SR";
  std::size_t ev_seeds = 1, limit = 0;
  ev->add_option("--systems", systems, "Comma-separated: verve,base,adaptive,paraphrase,drg,tg");
  ev->add_option("--data", ev_data, "Data directory written by preprocess")->required();
  ev->add_option("--models", ev_models, "Model root written by 'train all'");
  ev->add_option("--config", ev_cfg, "Pipeline config for loop and decoding parameters (JSON)");
  ev->add_option("--out", ev_out, "Report directory")->required();
  ev->add_option("--seeds", ev_seeds, "Generator seeds 0..n-1; aggregates pool all seeds")->check(CLI::PositiveNumber);
  ev->add_option("--split", split, "test|annomi")->check(CLI::IsMember({"test", "annomi"}));
  ev->add_option("--labels", labels, "Original reflection labels to keep (PAIR split)");
  ev->add_option("--limit", limit, "Evaluate at most this many exchanges");
  ev->callback([&] {
    action = [&] {
      const auto cfg = pipeline_config(ev_cfg);
      const auto data = load_data(ev_data);
      const auto keep = split_list(labels);
      std::vector<corpus::Exchange> subset;
      for (const auto& ex : split == "test" ? data.test : data.annomi) {
        if (split == "test" && ex.reflection_label &&
            std::find(keep.begin(), keep.end(), corpus::to_string(*ex.reflection_label)) == keep.end())
          continue;
        subset.push_back(ex);
        if (limit && subset.size() == limit) break;
      }
      EvaluationRun run;
      run.systems = split_list(systems);
      for (const auto& s : run.systems) system_spec(s);
      run.seeds = seed_range(ev_seeds);
      run.decoding = cfg.decoding;
      run.loop = cfg.loop;
      const auto models = load_evaluation_models(ev_models);
      std::map<std::string, rewriter::RewriteResult> traces;
      const auto rep =
          evaluate_systems(ev_models, models, run, subset, data.references.empty() ? nullptr : &data.references, &traces, logger);
      fs::create_directories(ev_out);
      std::ofstream(fs::path(ev_out) / "report.json") << metrics::to_json(rep).dump(1) << '\n';
      std::ofstream(fs::path(ev_out) / "records.csv") << metrics::records_csv(rep);
      std::ofstream(fs::path(ev_out) / "aggregates.csv") << metrics::aggregates_csv(rep);
      std::ofstream tf(fs::path(ev_out) / "traces.jsonl");
      for (const auto& [key, t] : traces) tf << nlohmann::json{{"key", key}, {"result", rewriter::to_json(t, cfg.mask)}}.dump() << '\n';
      print_summary(out, rep, run.systems);
      if (!rep.failures.empty()) err << rep.failures.size() << " rewrites failed; see report.json" << std::endl;
    };
  });

  // serve
  auto* sv = app.add_subcommand("serve", "Serve POST /v1/rewrite, POST /v1/score and GET /healthz");
  std::string sv_cfg, host = "127.0.0.1";
  int port = -1;
  sv->add_option("--config", sv_cfg, "Pipeline config (JSON)");
  sv->add_option("--host", host, "Bind address");
  sv->add_option("--port", port, "Port (overrides config and VERVE_PORT)")->check(CLI::Range(0, 65535));
  sv->callback([&] {
    action = [&] {
      auto cfg = pipeline_config(sv_cfg);
      if (port >= 0) cfg.port = port;
      const auto p = Pipeline::load(cfg);
      Service service(p, cfg.workers, logger);
      const int bound = service.bind(host, cfg.port);
      if (bound < 0) throw CliError("bind_failed", "cannot bind " + host + ":" + std::to_string(cfg.port));
      out << "listening on http://" << host << ":" << bound << std::endl;
      g_shutdown = false;
      auto prev_int = std::signal(SIGINT, on_signal);
      auto prev_term = std::signal(SIGTERM, on_signal);
      std::thread watcher([&] {
        while (!g_shutdown) std::this_thread::sleep_for(std::chrono::milliseconds(50));
        service.stop();
      });
      service.serve();
      g_shutdown = true;
      watcher.join();
      std::signal(SIGINT, prev_int);
      std::signal(SIGTERM, prev_term);
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return 2;
  }

  try {
    action();
  } catch (const CliError& e) {
    err << nlohmann::json{{"error", e.code()}, {"message", e.what()}}.dump() << std::endl;
    return 1;
  } catch (const ConfigError& e) {
    err << nlohmann::json{{"error", "config"}, {"message", e.what()}}.dump() << std::endl;
    return 1;
  } catch (const ServiceUnavailable& e) {
    err << nlohmann::json{{"error", "models_unavailable"}, {"message", e.what()}}.dump() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    err << nlohmann::json{{"error", "runtime"}, {"message", e.what()}}.dump() << std::endl;
    return 1;
  }
  return 0;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace verve::interface
