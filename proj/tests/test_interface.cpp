#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "verve/interface/cli.hpp"
#include "verve/interface/pipeline.hpp"
#include "verve/interface/service.hpp"

using namespace verve;
using namespace verve::interface;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("verve_test_interface_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

reflection::ModelConfig tiny_encoder() {
  reflection::ModelConfig c;
  c.d_model = 32;
  c.heads = 2;
  c.d_ff = 64;
  c.layers = 1;
  c.max_len = 96;
  c.epochs = 3;
  return c;
}

struct Fixture {
  fs::path data_dir, root;
  DataDir data;
};

// Tiny models under one root in the standard layout, trained once.
const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture f;
    f.data_dir = scratch("data");
    f.root = scratch("models");
    preprocess({}, f.data_dir);
    f.data = load_data(f.data_dir);
    f.data.train.resize(120);
    f.data.dev.resize(30);
    f.data.test.resize(30);
    train_discriminator(f.data, tiny_encoder(), f.root / "discriminator");
    train_scorer(f.data, tiny_encoder(), f.root / "scorer");
    train_metric_models(f.data, f.root / "metrics");
    const auto disc = reflection::Discriminator::load(f.root / "discriminator");
    GeneratorRecipe recipe;
    recipe.model.d_model = 32;
    recipe.model.heads = 2;
    recipe.model.d_ff = 64;
    recipe.model.layers = 1;
    recipe.model.epochs = 2;
    recipe.n_paraphrases = 1;
    train_generator(f.data, recipe, &disc, generator_dir(f.root, 0, "verve"));
    return f;
  }();
  return f;
}

PipelineConfig tiny_config() {
  PipelineConfig c;
  c.checkpoint_root = fixture().root;
  c.decoding.beams = 2;
  c.decoding.max_length = 24;
  return c;
}

const Pipeline& loaded() {
  static const Pipeline p = Pipeline::load(tiny_config());
  return p;
}

const Pipeline& unloaded() {
  static const Pipeline p = [] {
    PipelineConfig c;
    c.checkpoint_root = scratch("empty");
    return Pipeline::load(c);
  }();
  return p;
}

const std::string kPair = R"({"prompt":"i keep eating junk food even though i am dieting","response":"you should try harder."})";

}  // namespace

TEST_CASE("config file parsing and validation") {
  const auto dir = scratch("config");
  write_file(dir / "ok.json", R"({"checkpoint_root":"/srv/models","checkpoints":{"scorer":"sc"},
      "loop":{"max_attempts":3},"decoding":{"beams":4},"mask":"[M]","seed":7,"server":{"port":9000,"workers":3}})");
  const auto c = load_config(dir / "ok.json");
  CHECK(c.checkpoint_root == "/srv/models");
  CHECK(c.checkpoints.scorer == "sc");
  CHECK(c.checkpoints.discriminator == "discriminator");
  CHECK(c.loop.max_attempts == 3);
  CHECK(c.decoding.beams == 4);
  CHECK(c.mask == "[M]");
  CHECK(c.seed == 7);
  CHECK(c.port == 9000);
  CHECK(c.workers == 3);
  CHECK(c.resolve("sc") == fs::path("/srv/models/sc"));
  CHECK(c.resolve("/abs/x") == fs::path("/abs/x"));

  const json round = c;
  CHECK(round.get<PipelineConfig>().port == 9000);

  write_file(dir / "bad.json", "{ not json");
  try {
    load_config(dir / "bad.json");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bad.json") != std::string::npos);
  }
  try {
    load_config(dir / "missing.json");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("missing.json") != std::string::npos);
  }
  write_file(dir / "port.json", R"({"server":{"port":70000}})");
  CHECK_THROWS_AS(load_config(dir / "port.json"), ConfigError);
  write_file(dir / "beams.json", R"({"decoding":{"beams":0}})");
  CHECK_THROWS_AS(load_config(dir / "beams.json"), ConfigError);
}

TEST_CASE("environment overrides") {
  PipelineConfig c;
  setenv("VERVE_PORT", "9123", 1);
  setenv("VERVE_CHECKPOINT_ROOT", "/tmp/elsewhere", 1);
  apply_env_overrides(c);
  CHECK(c.port == 9123);
  CHECK(c.checkpoint_root == "/tmp/elsewhere");
  setenv("VERVE_PORT", "eighty", 1);
  CHECK_THROWS_AS(apply_env_overrides(c), ConfigError);
  unsetenv("VERVE_PORT");
  unsetenv("VERVE_CHECKPOINT_ROOT");
  PipelineConfig d;
  apply_env_overrides(d);
  CHECK(d.port == 8080);
}

TEST_CASE("preprocess writes the data directory") {
  const auto& f = fixture();
  for (const char* name : {"train.jsonl", "dev.jsonl", "test.jsonl", "annomi.jsonl", "references.jsonl", "stats.json"})
    CHECK(fs::exists(f.data_dir / name));
  const auto full = load_data(f.data_dir);
  const auto total = full.train.size() + full.dev.size() + full.test.size();
  CHECK(total == 2544);
  CHECK(full.test.size() == doctest::Approx(0.2 * total).epsilon(0.01));
  CHECK_FALSE(full.annomi.empty());
  for (const auto& ex : full.annomi) CHECK(ex.reflection_label == corpus::Reflection::NR);
  CHECK_FALSE(full.references.empty());
}

TEST_CASE("system table") {
  CHECK(system_spec("verve").generator == "verve");
  CHECK(system_spec("verve").attempts == 5);
  CHECK(system_spec("base").attempts == 1);
  CHECK(system_spec("adaptive").generator == "base");
  CHECK(system_spec("adaptive").attempts == 5);
  CHECK(system_spec("paraphrase").generator == "verve");
  CHECK(system_spec("paraphrase").attempts == 1);
  CHECK(system_spec("drg").generator == "drg");
  CHECK(system_spec("tg").generator == "tg");
  CHECK_THROWS(system_spec("nope"));
  CHECK(generator_dir("/m", 2, "tg") == fs::path("/m/generators/seed-2/tg"));
  const auto r = recipe_for("base", GeneratorRecipe{}, 3);
  CHECK_FALSE(r.paraphrase);
  CHECK(r.source == TemplateSource::Attention);
  CHECK(recipe_for("drg", GeneratorRecipe{}, 0).source == TemplateSource::Drg);
  CHECK(recipe_for("verve", GeneratorRecipe{}, 0).paraphrase);
}

TEST_CASE("pipeline health reflects loaded checkpoints") {
  const auto h = loaded().health();
  CHECK(h["status"] == "ok");
  CHECK(h["models"]["discriminator"] == true);
  CHECK(h["models"]["generator"] == true);
  const auto u = unloaded().health();
  CHECK(u["status"] == "ok");
  CHECK(u["models"]["scorer"] == false);
  CHECK_FALSE(unloaded().can_rewrite());
  CHECK_THROWS_AS(unloaded().rewrite("a", "b"), ServiceUnavailable);

  PipelineConfig broken = tiny_config();
  const auto dir = scratch("broken");
  fs::create_directories(dir / "discriminator");
  write_file(dir / "discriminator" / "manifest.json", "{}");
  broken.checkpoint_root = dir;
  CHECK_THROWS_AS(Pipeline::load(broken), ConfigError);
}

TEST_CASE("rewrite handler status codes") {
  const auto& p = loaded();
  auto status = [&](const std::string& body) { return handle_rewrite(p, body).status; };
  CHECK(status("{not json") == 400);
  CHECK(status("[1,2]") == 400);
  CHECK(status(R"({"response":"x"})") == 422);
  CHECK(handle_rewrite(p, R"({"response":"x"})").body["field"] == "prompt");
  CHECK(status(R"({"prompt":"x"})") == 422);
  CHECK(status(R"({"prompt":"x","response":5})") == 400);
  CHECK(status(R"({"prompt":"  ","response":"x"})") == 422);
  CHECK(handle_rewrite(p, R"({"prompt":"  ","response":"x"})").body["code"] == "empty_field");
  CHECK(status(R"({"prompt":"x","response":"y","options":{"max_attempts":0}})") == 422);
  CHECK(status(R"({"prompt":"x","response":"y","options":{"beams":17}})") == 422);
  const auto unknown = handle_rewrite(p, R"({"prompt":"x","response":"y","options":{"temperature":1}})");
  CHECK(unknown.status == 422);
  CHECK(unknown.body["field"] == "options.temperature");
  CHECK(handle_rewrite(unloaded(), kPair).status == 503);
  CHECK(handle_rewrite(unloaded(), kPair).body["code"] == "models_unavailable");
  // Validation precedes the availability check.
  CHECK(handle_rewrite(unloaded(), "{}").status == 422);

  const auto ok = handle_rewrite(p, kPair);
  REQUIRE(ok.status == 200);
  const auto& r = ok.body["result"];
  CHECK(r["attempts"].size() >= 1);
  CHECK(r["attempts"].size() <= 5);
  CHECK(r.contains("final"));
  CHECK(r.contains("stopped_reason"));
  CHECK(r["final_score"].get<double>() >= r["original_score"].get<double>() - 1e-9);
  CHECK(r["improvement"].get<double>() ==
        doctest::Approx(r["final_score"].get<double>() - r["original_score"].get<double>()));
  CHECK(ok.body["seed"] == 0);

  const auto one = handle_rewrite(p, R"({"prompt":"my job is awful","response":"quit then.","options":{"max_attempts":1}})");
  REQUIRE(one.status == 200);
  CHECK(one.body["result"]["attempts"].size() == 1);
}

TEST_CASE("score handler") {
  const auto r = handle_score(loaded(), kPair);
  REQUIRE(r.status == 200);
  double sum = 0;
  for (const char* k : {"NR", "SR", "CR"}) sum += r.body["probabilities"][k].get<double>();
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.body["score"].get<double>() >= 0.0);
  CHECK(r.body["score"].get<double>() <= 1.0);
  CHECK((r.body["label"] == "NR" || r.body["label"] == "SR" || r.body["label"] == "CR"));
  CHECK(handle_score(unloaded(), kPair).status == 503);
  CHECK(handle_score(loaded(), R"({"prompt":"x"})").status == 422);
  CHECK(handle_health(unloaded()).status == 200);
}

TEST_CASE("http round trip") {
  std::vector<std::string> log;
  std::mutex log_mutex;
  Service service(loaded(), 3, [&](const std::string& line) {
    std::lock_guard lock(log_mutex);
    log.push_back(line);
  });
  const int port = service.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread server([&] { service.serve(); });
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(60, 0);
  for (int i = 0; i < 100 && !service.running(); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));

  auto health = client.Get("/healthz");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(json::parse(health->body)["status"] == "ok");

  auto bad = client.Post("/v1/rewrite", "{oops", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  CHECK(json::parse(bad->body).contains("message"));

  auto score = client.Post("/v1/score", kPair, "application/json");
  REQUIRE(score);
  CHECK(score->status == 200);

  std::vector<std::future<std::string>> calls;
  for (int i = 0; i < 4; ++i)
    calls.push_back(std::async(std::launch::async, [port] {
      httplib::Client c("127.0.0.1", port);
      c.set_read_timeout(60, 0);
      auto r = c.Post("/v1/rewrite", kPair, "application/json");
      return r && r->status == 200 ? r->body : std::string("failed");
    }));
  std::vector<std::string> bodies;
  for (auto& c : calls) bodies.push_back(c.get());
  for (const auto& b : bodies) {
    CHECK(b != "failed");
    CHECK(b == bodies.front());
  }

  service.stop();
  server.join();
  std::lock_guard lock(log_mutex);
  REQUIRE(log.size() >= 7);
  CHECK(log.front().rfind("GET /healthz 200 ", 0) == 0);
}

TEST_CASE("command line") {
  std::ostringstream out, err;
  CHECK(cli_main({"rewrite", "--bogus"}, out, err) == 2);
  CHECK(cli_main({}, out, err) == 2);
  CHECK(cli_main({"evaluate", "--systems", "verve"}, out, err) == 2);

  err.str("");
  CHECK(cli_main({"rewrite", "--config", "/nonexistent/verve.json", "--prompt", "a", "--response", "b"}, out, err) == 1);
  CHECK(err.str().find("/nonexistent/verve.json") != std::string::npos);
  CHECK(json::parse(err.str()).contains("error"));

  const auto dir = scratch("cli");
  const json cfg = tiny_config();
  write_file(dir / "verve.json", cfg.dump());
  out.str("");
  REQUIRE(cli_main({"rewrite", "--config", (dir / "verve.json").string(), "--prompt", "my job is awful", "--response",
                    "quit then.", "--max-attempts", "2"},
                   out, err) == 0);
  const auto r = json::parse(out.str());
  CHECK(r["attempts"].size() <= 2);
  CHECK(r.contains("final"));

  out.str("");
  REQUIRE(cli_main({"score", "--config", (dir / "verve.json").string(), "--prompt", "my job is awful", "--response",
                    "your job is awful."},
                   out, err) == 0);
  CHECK(json::parse(out.str()).contains("probabilities"));
}

TEST_CASE("serve command stops on request") {
  const auto dir = scratch("serve");
  json cfg = tiny_config();
  cfg["server"]["port"] = 0;
  write_file(dir / "verve.json", cfg.dump());
  std::ostringstream err;
  std::stringstream out;
  auto run = std::async(std::launch::async, [&] {
    return cli_main({"serve", "--config", (dir / "verve.json").string()}, out, err);
  });
  int port = 0;
  for (int i = 0; i < 500 && port == 0; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
    const auto s = out.str();
    const auto colon = s.rfind(':');
    if (s.find("listening on") != std::string::npos && colon != std::string::npos) port = std::stoi(s.substr(colon + 1));
  }
  REQUIRE(port > 0);
  httplib::Client client("127.0.0.1", port);
  auto h = client.Get("/healthz");
  REQUIRE(h);
  CHECK(h->status == 200);
  request_shutdown();
  CHECK(run.get() == 0);
}

TEST_CASE("evaluation over trained systems") {
  const auto& f = fixture();
  const auto models = load_evaluation_models(f.root);
  CHECK(models.disc);
  CHECK(models.lm);
  CHECK_FALSE(models.coherence);
  EvaluationRun run;
  run.systems = {"verve", "paraphrase", "tg"};
  run.seeds = {0};
  run.decoding.beams = 1;
  run.decoding.max_length = 24;
  std::vector<corpus::Exchange> subset(f.data.test.begin(), f.data.test.begin() + 4);
  std::map<std::string, rewriter::RewriteResult> traces;
  const auto rep = evaluate_systems(f.root, models, run, subset, &f.data.references, &traces);
  CHECK(rep.values("verve", metrics::kChangeInReflection).size() == 4);
  CHECK(rep.values("paraphrase", metrics::kChangeInReflection).size() == 4);
  // No tg generator was trained.
  CHECK(rep.values("tg", metrics::kChangeInReflection).empty());
  CHECK_FALSE(rep.failures.empty());
  CHECK(traces.size() == 8);
  for (const auto& [key, t] : traces) {
    if (key.rfind("paraphrase/", 0) == 0) CHECK(t.attempts.size() == 1);
    CHECK(t.attempts.size() <= 5);
    CHECK(t.final_score >= t.original_score - 1e-9);
  }
}
