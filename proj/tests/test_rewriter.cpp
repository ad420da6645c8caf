#include "doctest.h"

#include <atomic>
#include <map>

#include "verve/rewriter/rewriter.hpp"
#include "verve/text/tokenize.hpp"

using namespace verve;
using namespace verve::rewriter;

namespace {

// Scores come from a script indexed by attempt; templates mask more words as C drops.
class ScriptedBackend final : public Backend {
 public:
  ScriptedBackend(double original, std::vector<double> scores) : original_(original), scores_(std::move(scores)) {}

  templating::Template make_template(std::string_view, std::string_view response, double c) const override {
    templating::Template t;
    t.words = text::words(response);
    const std::size_t k = attempt_of(c);
    for (std::size_t i = 0; i < t.words.size(); ++i) t.masked.push_back(noop_ ? false : i <= k);
    t.content_weight = c;
    t.noop = t.masked_count() == 0;
    return t;
  }
  std::string fill(std::string_view, const templating::Template& t) const override {
    ++fills;
    return "candidate " + std::to_string(attempt_of(t.content_weight));
  }
  double score(std::string_view, std::string_view response) const override {
    const std::string r(response);
    if (r.rfind("candidate ", 0) == 0) return scores_.at(std::stoul(r.substr(10)));
    return original_;
  }

  bool noop_ = false;
  mutable std::atomic<int> fills{0};

 private:
  static std::size_t attempt_of(double c) { return static_cast<std::size_t>(std::lround((1.0 - c) * 10.0)); }
  double original_;
  std::vector<double> scores_;
};

const std::string kResponse = "you should try to walk every day";

}  // namespace

TEST_CASE("content weight schedule") {
  LoopConfig cfg;
  const std::vector<double> expect{1.0, 0.9, 0.8, 0.7, 0.6};
  for (std::size_t k = 0; k < 5; ++k) CHECK(content_weight_at(cfg, k) == expect[k]);
  nlohmann::json j = cfg;
  CHECK(j.get<LoopConfig>().max_attempts == 5);
  j["max_attempts"] = 0;
  CHECK_THROWS(j.get<LoopConfig>());
  j["max_attempts"] = 11;
  CHECK_THROWS(j.get<LoopConfig>());
  j["max_attempts"] = 5;
  j["rule"] = "distance";
  CHECK_THROWS(j.get<LoopConfig>());
}

TEST_CASE("loop examples") {
  SUBCASE("stops at the first improvement above 0.2") {
    ScriptedBackend b(0.5, {0.55, 0.60, 0.65, 0.75, 0.99});
    auto r = rewrite(b, "p", kResponse);
    CHECK(r.attempts.size() == 4);
    CHECK(r.attempts.back().content_weight == 0.7);
    CHECK(r.stopped_reason == StopReason::Improved);
    CHECK(r.final_text == "candidate 3");
    CHECK(r.improvement == doctest::Approx(0.25));
  }
  SUBCASE("budget exhausted keeps the best attempt") {
    ScriptedBackend b(0.5, {0.55, 0.70, 0.60, 0.70, 0.52});
    auto r = rewrite(b, "p", kResponse);
    CHECK(r.attempts.size() == 5);
    CHECK(r.stopped_reason == StopReason::BudgetExhausted);
    CHECK(r.final_text == "candidate 1");
    CHECK(r.final_score == 0.70);
  }
  SUBCASE("never degrades") {
    ScriptedBackend b(0.5, {0.1, 0.2, 0.5, 0.3, 0.4});
    auto r = rewrite(b, "p", kResponse);
    CHECK(r.final_text == kResponse);
    CHECK(r.final_score == 0.5);
    CHECK(r.improvement == 0.0);
    CHECK(r.stopped_reason == StopReason::BudgetExhausted);
  }
  SUBCASE("no-op template short-circuits") {
    ScriptedBackend b(0.3, {0.9, 0.9, 0.9, 0.9, 0.9});
    b.noop_ = true;
    auto r = rewrite(b, "p", kResponse);
    CHECK(r.attempts.size() == 1);
    CHECK(r.attempts[0].candidate == kResponse);
    CHECK(r.attempts[0].score == 0.3);
    CHECK(r.stopped_reason == StopReason::NoopTemplate);
    CHECK(r.final_text == kResponse);
    CHECK(b.fills == 0);
  }
  SUBCASE("inter-attempt rule") {
    LoopConfig cfg;
    cfg.rule = StopRule::InterAttempt;
    ScriptedBackend b(0.1, {0.25, 0.40, 0.65, 0.9, 0.9});
    auto r = rewrite(b, "p", kResponse, cfg);
    CHECK(r.attempts.size() == 3);
    CHECK(r.stopped_reason == StopReason::Improved);
  }
}

TEST_CASE("loop matches an independent oracle over all score sequences") {
  // Scores on a grid; original and five attempts enumerated exhaustively.
  const std::vector<double> grid{0.0, 0.15, 0.3, 0.45, 0.6, 0.9};
  std::vector<std::size_t> idx(6, 0);
  std::size_t cases = 0;
  while (true) {
    const double orig = grid[idx[0]];
    std::vector<double> s;
    for (std::size_t k = 1; k < 6; ++k) s.push_back(grid[idx[k]]);

    // Oracle.
    std::size_t n = 5;
    bool improved = false;
    for (std::size_t k = 0; k < 5; ++k)
      if (s[k] - orig > 0.2) {
        n = k + 1;
        improved = true;
        break;
      }
    std::size_t best = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (s[k] > s[best]) best = k;
    const bool fallback = s[best] <= orig;

    ScriptedBackend b(orig, s);
    const auto r = rewrite(b, "p", kResponse);
    CHECK(r.attempts.size() == n);
    CHECK(r.stopped_reason == (improved ? StopReason::Improved : StopReason::BudgetExhausted));
    CHECK(r.final_text == (fallback ? kResponse : "candidate " + std::to_string(best)));
    CHECK(r.final_score == (fallback ? orig : s[best]));
    for (std::size_t k = 0; k < r.attempts.size(); ++k) {
      CHECK(r.attempts[k].content_weight == content_weight_at({}, k));
      CHECK(r.final_score >= r.attempts[k].score);
      if (k > 0)
        for (std::size_t w = 0; w < r.attempts[k].tmpl.words.size(); ++w)
          if (r.attempts[k - 1].tmpl.masked[w]) CHECK(r.attempts[k].tmpl.masked[w]);
    }
    ++cases;

    std::size_t pos = 0;
    while (pos < 6 && ++idx[pos] == grid.size()) idx[pos++] = 0;
    if (pos == 6) break;
  }
  CHECK(cases == 46656);
}

TEST_CASE("result JSON carries the trace") {
  ScriptedBackend b(0.2, {0.3, 0.5});
  LoopConfig cfg;
  cfg.max_attempts = 2;
  const auto j = to_json(rewrite(b, "p", kResponse, cfg));
  CHECK(j.at("attempts").size() == 2);
  CHECK(j.at("attempts")[1].at("content_weight") == 0.9);
  CHECK(j.at("attempts")[1].at("rendered_template") == "<mask> try to walk every day");
  CHECK(j.at("stopped_reason") == "IMPROVED");
  CHECK(j.at("final") == "candidate 1");
}

TEST_CASE("model errors carry the attempt") {
  class Failing final : public Backend {
   public:
    templating::Template make_template(std::string_view, std::string_view r, double c) const override {
      templating::Template t;
      t.words = text::words(r);
      t.masked.assign(t.words.size(), true);
      t.content_weight = c;
      return t;
    }
    std::string fill(std::string_view, const templating::Template&) const override {
      throw generator::GenerationError("empty output");
    }
    double score(std::string_view, std::string_view) const override { return 0.1; }
  };
  Failing f;
  try {
    rewrite(f, "p", kResponse);
    FAIL("expected RewriteError");
  } catch (const RewriteError& e) {
    CHECK(e.content_weight() == 1.0);
    CHECK(std::string(e.what()).find("empty output") != std::string::npos);
  }
}

TEST_CASE("salience extractors") {
  const auto table = templating::SalienceTable::build({"you feel sad"}, {"you should try"});
  auto drg = drg_extractor(table);
  auto t = drg("prompt", "you should feel", 0.8);
  CHECK(t.extractor == templating::Extractor::Drg);
  CHECK(t.content_weight == 0.8);
  CHECK(t == [&] {
    auto x = templating::drg_extract("you should feel", table, 0.3);
    x.content_weight = 0.8;
    return x;
  }());
  auto tg = tg_extractor(table);
  CHECK(tg("p", "you should feel", 1.0).extractor == templating::Extractor::Tg);
}
