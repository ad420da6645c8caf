#include "doctest.h"

#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "verve/corpus/synthetic.hpp"
#include "verve/metrics/coherence.hpp"
#include "verve/metrics/keyphrase.hpp"
#include "verve/metrics/language_model.hpp"
#include "verve/metrics/report.hpp"
#include "verve/metrics/similarity.hpp"
#include "verve/metrics/specificity.hpp"
#include "verve/metrics/ter.hpp"
#include "verve/text/tokenize.hpp"

using namespace verve;
using namespace verve::metrics;
using Words = std::vector<std::string>;

namespace {

// Top-down memoized Levenshtein, written independently of the library DP.
std::size_t oracle_distance(const Words& a, const Words& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    const auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = go(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
    best = std::min(best, go(i + 1, j) + 1);
    best = std::min(best, go(i, j + 1) + 1);
    return memo[key] = best;
  };
  return go(0, 0);
}

std::vector<Words> all_sequences(std::size_t max_len) {
  std::vector<Words> out{{}};
  std::vector<Words> frontier{{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<Words> next;
    for (const auto& w : frontier)
      for (const char* s : {"a", "b", "c"}) {
        auto x = w;
        x.push_back(s);
        next.push_back(x);
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

std::vector<double> power_iteration(const std::vector<std::vector<double>>& w, double d) {
  const std::size_t n = w.size();
  std::vector<double> s(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < 10000; ++it) {
    std::vector<double> next(n, (1.0 - d) / static_cast<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
      double out = 0.0;
      for (double x : w[j]) out += x;
      for (std::size_t i = 0; i < n; ++i) next[i] += d * s[j] * (out > 0.0 ? w[j][i] / out : 1.0 / static_cast<double>(n));
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) delta += std::abs(next[i] - s[i]);
    s = std::move(next);
    if (delta < 1e-15) break;
  }
  return s;
}

const std::vector<std::string> kFuzzWords{"food",   "dieting", "mother", "cancer", "healthy", "sad",    "job",
                                          "work",   "the",     "and",    "you",    "feel",    "try",    "really",
                                          "family", "worried", "time",   "to",     "is",      "stress", "big"};

std::string random_text(std::mt19937_64& rng, std::size_t max_words) {
  std::uniform_int_distribution<std::size_t> len(1, max_words);
  std::uniform_int_distribution<std::size_t> pick(0, kFuzzWords.size() - 1);
  std::string s;
  for (std::size_t i = 0, n = len(rng); i < n; ++i) s += (i ? " " : "") + kFuzzWords[pick(rng)];
  return s;
}

reflection::ModelConfig tiny_config() {
  reflection::ModelConfig c;
  c.d_model = 32;
  c.heads = 2;
  c.d_ff = 64;
  c.layers = 1;
  c.max_len = 96;
  c.epochs = 4;
  c.warmup_steps = 5;
  return c;
}

std::vector<corpus::Exchange> small_corpus() {
  corpus::SyntheticPairOptions o;
  o.complex_reflections = 40;
  o.simple_reflections = 20;
  o.non_reflections = 100;
  return corpus::synthesize_pair(o);
}

}  // namespace

TEST_CASE("TER examples") {
  CHECK(ter("a b c", "a x c") == doctest::Approx(1.0 / 3.0));
  CHECK(ter("you should walk", "you should walk") == 0.0);
  CHECK(ter("a b c d e", "c d e a b", false) == doctest::Approx(0.8));
  CHECK(ter("a b c d e", "c d e a b") == doctest::Approx(0.2));
  CHECK(ter("a b", "a b c d") == doctest::Approx(1.0));
  CHECK(ter("a", "x y z") == doctest::Approx(3.0));
  CHECK_THROWS(ter("  ", "a"));
}

TEST_CASE("shiftless TER equals the brute-force edit distance") {
  const auto seqs = all_sequences(8);
  REQUIRE(seqs.size() == 9841);
  std::size_t pairs = 0;
  // Every pair up to length 5 ...
  std::vector<Words> shorts;
  for (const auto& s : seqs)
    if (s.size() <= 5) shorts.push_back(s);
  for (const auto& r : shorts)
    for (const auto& h : shorts) {
      if (r.empty()) continue;
      const auto st = ter_stats(r, h, false);
      CHECK(st.shifts == 0);
      if (st.edits != oracle_distance(r, h)) FAIL_CHECK("mismatch");
      ++pairs;
    }
  // ... and every sequence up to length 8 against a fixed random panel.
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, seqs.size() - 1);
  std::vector<Words> panel;
  for (int i = 0; i < 12; ++i) panel.push_back(seqs[pick(rng)]);
  for (const auto& r : seqs) {
    if (r.empty()) continue;
    for (const auto& h : panel) {
      const auto st = ter_stats(r, h, false);
      if (st.rate() != static_cast<double>(oracle_distance(r, h)) / static_cast<double>(r.size()))
        FAIL_CHECK("rate mismatch");
      ++pairs;
    }
  }
  CHECK(pairs > 200000);
}

TEST_CASE("shifts never increase the edit count") {
  const auto seqs = all_sequences(8);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> pick(1, seqs.size() - 1);
  for (int i = 0; i < 3000; ++i) {
    const auto& r = seqs[pick(rng)];
    const auto& h = seqs[pick(rng)];
    const auto with = ter_stats(r, h, true);
    const auto without = ter_stats(r, h, false);
    CHECK(with.edits + with.shifts <= without.edits);
  }
}

TEST_CASE("PageRank solve matches power iteration on toy graphs") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int g = 0; g < 50; ++g) {
    const std::size_t n = 1 + static_cast<std::size_t>(g % 10);
    std::vector<std::vector<double>> w(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (u(rng) < 0.6) w[a][b] = w[b][a] = u(rng) * 3.0;
    const auto got = rank_topics(w);
    const auto want = power_iteration(w, kDamping);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(std::abs(got[i] - want[i]) < 1e-6);
      sum += got[i];
    }
    CHECK(sum == doctest::Approx(1.0));
  }
}

TEST_CASE("TopicRank on a toy text") {
  const std::string text =
      "My mother had breast cancer last year. Now I worry about cancer every day. "
      "My doctor says healthy food and exercise help.";
  const auto g = build_topic_graph(text, *text::default_tagger());
  REQUIRE(!g.topics.empty());
  CHECK(g.topics.size() <= 10);
  const auto scores = rank_topics(g.weights);
  const auto oracle = power_iteration(g.weights, kDamping);
  for (std::size_t i = 0; i < scores.size(); ++i) CHECK(std::abs(scores[i] - oracle[i]) < 1e-6);
  const auto ks = extract_keyphrases(text);
  CHECK(ks.phrases.size() == g.topics.size());
  for (std::size_t i = 1; i < ks.phrases.size(); ++i) CHECK(ks.phrases[i - 1].score >= ks.phrases[i].score);
}

TEST_CASE("keyphrase examples") {
  const auto k = extract_keyphrases("dieting doesn't work");
  bool found = false;
  for (const auto& p : k.phrases) found |= p.surface.find("dieting") != std::string::npos;
  CHECK(found);

  const auto twice = extract_keyphrases("the job is hard. the job is long.");
  std::size_t jobs = 0;
  for (const auto& p : twice.phrases) jobs += p.surface == "job";
  CHECK(jobs == 1);

  const auto none = extract_keyphrases("it is what it is");
  CHECK(none.phrases.empty());
  CHECK(none.degenerate);
}

TEST_CASE("keyphrase coverage") {
  CHECK(keyphrase_coverage("you crave unhealthy food while dieting", "dieting makes unhealthy food tempting").value == 1.0);
  CHECK(keyphrase_coverage("your mother worries about money", "the weather is nice").value == 0.0);
  const auto degenerate = keyphrase_coverage("it is what it is", "anything");
  CHECK(degenerate.value == 1.0);
  CHECK(degenerate.degenerate);
  const auto half = keyphrase_coverage("dieting is hard. my family hates the gym", "dieting sounds hard");
  CHECK(half.value > 0.0);
  CHECK(half.value < 1.0);
}

TEST_CASE("identity fuzz for coverage and TER") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 10000; ++i) {
    const auto x = random_text(rng, 14);
    if (keyphrase_coverage(x, x).value != 1.0) FAIL_CHECK("coverage(x,x) != 1 for " << x);
    if (ter(x, x) != 0.0) FAIL_CHECK("ter(x,x) != 0 for " << x);
    const auto y = random_text(rng, 14);
    const double c = keyphrase_coverage(x, y).value;
    if (c < 0.0 || c > 1.0) FAIL_CHECK("coverage out of range");
  }
}

TEST_CASE("Kneser-Ney language model") {
  const std::vector<std::string> corpus{"you feel sad about your job", "you feel worried about your family",
                                        "you want to change your job", "it sounds like work is hard",
                                        "you feel like nobody listens"};
  const auto lm = NgramLM::train(corpus);

  SUBCASE("distributions sum to one") {
    std::vector<std::string> vocab;
    for (const auto& t : corpus)
      for (const auto& w : text::words(t)) vocab.push_back(w);
    std::sort(vocab.begin(), vocab.end());
    vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
    vocab.push_back("</s>");
    vocab.push_back("<unk>");
    for (const Words& h : {Words{}, Words{"you"}, Words{"you", "feel"}, Words{"zebra", "feel"}, Words{"job"}}) {
      double total = 0.0;
      for (const auto& w : vocab) total += std::exp(lm.log_prob(h, w));
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
  SUBCASE("repeated tokens beat random tokens") {
    const std::string repeated = "you feel you feel you feel";
    const std::string random = "listens hard family change nobody sad";
    CHECK(lm.perplexity(repeated) < lm.perplexity(random));
  }
  SUBCASE("single token and determinism") {
    CHECK(lm.perplexity("you") == doctest::Approx(std::exp(-lm.log_prob({}, "you"))));
    CHECK(lm.perplexity("you feel sad") == lm.perplexity("you feel sad"));
    CHECK_THROWS(lm.perplexity("   "));
    CHECK(lm.perplexity("quantum entanglement") > 0.0);
  }
  SUBCASE("serialization") {
    const auto back = NgramLM::from_json(lm.to_json());
    CHECK(back.perplexity("you feel sad about work") == lm.perplexity("you feel sad about work"));
  }
  CHECK_THROWS(NgramLM::train(corpus, 0));
  CHECK_THROWS(NgramLM::train(corpus, 3, 1.5));
}

TEST_CASE("specificity") {
  const auto idf = IdfTable::build({"you feel sad", "you feel tired", "you feel lonely", "you miss your grandmother"});
  CHECK(idf.idf("you") == doctest::Approx(0.0));
  CHECK(idf.idf("grandmother") == doctest::Approx(std::log(4.0)));
  CHECK(idf.idf("unseen") == doctest::Approx(std::log(4.0)));

  const auto stop = raw_specificity(idf, "you and the it");
  CHECK(stop.degenerate);
  const auto rare = raw_specificity(idf, "grandmother lonely");
  const auto common = raw_specificity(idf, "feel");
  CHECK(rare.value > common.value);

  const auto n = normalize_min_max({2.0, 1.0, 3.0});
  CHECK(n == std::vector<double>{0.5, 0.0, 1.0});
  CHECK(normalize_min_max({2.0, 2.0}) == std::vector<double>{0.5, 0.5});
  CHECK(normalize_min_max({}).empty());
  CHECK(IdfTable::from_json(idf.to_json()).idf("tired") == idf.idf("tired"));
}

TEST_CASE("reference similarity") {
  const std::string ref = "it sounds like you are worried about your mother";
  CHECK(sentence_bleu(ref, ref) == doctest::Approx(100.0));
  CHECK(sentence_bleu("completely different words here", ref) < 1e-6);
  CHECK(corpus_bleu({ref, "a b c d e"}, {ref, "a b c d e"}) == doctest::Approx(100.0));
  CHECK_THROWS(corpus_bleu({ref}, {}));

  const double n = static_cast<double>(text::words(ref).size());
  CHECK(meteor(ref, ref) == doctest::Approx(1.0 - 0.5 / (n * n * n)));
  CHECK(meteor("nothing shared", ref) == 0.0);
  // Stem matches count after exact matches.
  CHECK(meteor("you worry", "you worried") > meteor("you hurry", "you worried"));
  CHECK(meteor(ref, ref) > meteor("your mother worried you are it sounds like about", ref));
}

TEST_CASE("bootstrap intervals") {
  std::vector<double> v;
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.3, 0.1);
  for (int i = 0; i < 200; ++i) v.push_back(g(rng));
  const auto a = bootstrap_mean(v, 1000, 7);
  const auto b = bootstrap_mean(v, 1000, 7);
  CHECK(a.lower == b.lower);
  CHECK(a.lower < a.mean);
  CHECK(a.mean < a.upper);
  double s = 0.0;
  for (double x : v) s += x;
  CHECK(std::abs(a.mean - s / 200.0) < 1e-12);
  // Roughly mean +- 1.96 * sd / sqrt(n).
  CHECK(a.upper - a.lower == doctest::Approx(2 * 1.96 * 0.1 / std::sqrt(200.0)).epsilon(0.2));

  const auto c = bootstrap_mean({0.4, 0.4, 0.4});
  CHECK(c.lower == doctest::Approx(0.4));
  CHECK(c.upper == doctest::Approx(0.4));

  std::vector<double> shifted;
  for (double x : v) shifted.push_back(x + 0.05);
  const auto d = paired_bootstrap(shifted, v);
  CHECK(d.mean == doctest::Approx(0.05));
  CHECK(d.lower == doctest::Approx(0.05));
  CHECK_THROWS(paired_bootstrap({1.0}, {}));
  CHECK_THROWS(bootstrap_mean({}));
}

TEST_CASE("report aggregation") {
  corpus::Exchange nr{"e1", corpus::Dataset::Pair, "my job is awful", "have you tried quitting your job", corpus::Reflection::NR, {}};
  corpus::Exchange sr{"e2", corpus::Dataset::Pair, "my mother is sick", "your mother is sick", corpus::Reflection::SR, {}};
  corpus::Exchange an{"e3", corpus::Dataset::AnnoMI, "i drink too much", "what do you drink", {}, "question"};
  const auto idf = IdfTable::build({"my job is awful", "my mother is sick", "i drink", "your job", "your job is sick"});
  MetricModels models;
  models.idf = &idf;

  std::vector<System> systems{
      {"copy", [](const corpus::Exchange& e, std::uint64_t) { return e.response; }},
      {"echo", [](const corpus::Exchange& e, std::uint64_t seed) { return e.prompt + " " + std::to_string(seed); }},
      {"broken", [](const corpus::Exchange&, std::uint64_t) -> std::string { throw std::runtime_error("boom"); }}};
  EvaluateOptions opt;
  opt.seeds = {0, 1};
  opt.resamples = 200;
  const auto rep = evaluate(systems, {nr, sr, an}, models, opt);

  CHECK(rep.records.size() == 12);
  CHECK(rep.failures.size() == 6);
  CHECK(rep.failures[0].message == "boom");
  CHECK(std::find(rep.omitted.begin(), rep.omitted.end(), kChangeInReflection) != rep.omitted.end());

  for (const auto& a : rep.aggregates) {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& r : rep.records) {
      if (r.system != a.system || !r.values.count(a.metric)) continue;
      const bool in = a.group == "all" ||
                      (a.group == "reflection_label" &&
                       a.value == (r.exchange.reflection_label ? std::string(corpus::to_string(*r.exchange.reflection_label)) : "none")) ||
                      (a.group == "dataset" && a.value == corpus::to_string(r.exchange.dataset)) ||
                      (a.group == "behavior_label" && a.value == r.exchange.behavior_label.value_or("none")) ||
                      (a.group == "seed" && a.value == std::to_string(r.seed));
      if (!in) continue;
      s += r.values.at(a.metric);
      ++n;
    }
    CHECK(n == a.n);
    CHECK(std::abs(a.interval.mean - s / static_cast<double>(n)) < 1e-9);
  }
  CHECK(rep.find("copy", kEditRate)->interval.mean == 0.0);
  CHECK(rep.find("copy", kKeyphraseCoverage)->interval.mean == 1.0);
  CHECK(rep.find("copy", kEditRate, "reflection_label", "NR") != nullptr);
  CHECK(rep.find("copy", kEditRate, "reflection_label", "SR") != nullptr);
  CHECK(rep.find("copy", kEditRate, "behavior_label", "question")->n == 2);

  double lo = 1.0, hi = 0.0;
  for (const auto& r : rep.records) {
    const double s = r.values.at(kSpecificity);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    CHECK(r.values.at(kKeyphraseCoverage) >= 0.0);
    CHECK(r.values.at(kKeyphraseCoverage) <= 1.0);
  }
  CHECK(lo == 0.0);
  CHECK(hi == 1.0);

  const auto j = to_json(rep);
  CHECK(j.at("records").size() == 12);
  CHECK(records_csv(rep).rfind("system,seed,id,dataset,reflection_label,behavior_label,rewrite,", 0) == 0);
  const auto csv = records_csv(rep);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
  CHECK(aggregates_csv(rep).find("copy,reflection_label,NR,edit_rate,2,0,0,0") != std::string::npos);
}

TEST_CASE("empty dataset gives an empty report") {
  const auto rep = evaluate({{"copy", [](const corpus::Exchange& e, std::uint64_t) { return e.response; }}}, {}, {});
  CHECK(rep.records.empty());
  CHECK(rep.aggregates.empty());
  CHECK(to_json(rep).at("records").empty());
}

TEST_CASE("coherence and change in reflection with trained models") {
  const auto data = small_corpus();
  const auto pairs = shuffled_pairs(data, 3);
  REQUIRE(pairs.size() == 2 * data.size());
  for (std::size_t i = 0; i < data.size(); ++i) CHECK(pairs[2 * i + 1].response != data[i].response);
  CHECK_THROWS(shuffled_pairs({data[0]}, 1));

  const auto model = CoherenceModel::train(data, data, tiny_config());
  double matched = 0.0, mismatched = 0.0;
  for (const auto& p : pairs) {
    const double c = model.coherence(p.prompt, p.response);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    (p.related ? matched : mismatched) += c;
  }
  CHECK(matched > mismatched);
  CHECK_THROWS(model.coherence("", "x"));

  const auto scorer = reflection::Scorer::train(data, data, tiny_config());
  const auto& ex = data.front();
  CHECK(change_in_reflection(scorer, ex.prompt, ex.response, ex.response) == 0.0);
  const double d = change_in_reflection(scorer, ex.prompt, ex.response, "it sounds like you feel alone");
  CHECK(d == doctest::Approx(scorer.score(ex.prompt, "it sounds like you feel alone") - scorer.score(ex.prompt, ex.response)));
}
