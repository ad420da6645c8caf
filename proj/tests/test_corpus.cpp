#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>

#include "verve/corpus/annomi.hpp"
#include "verve/corpus/exchange.hpp"
#include "verve/corpus/split.hpp"
#include "verve/corpus/synthetic.hpp"
#include "verve/text/tokenize.hpp"

using namespace verve::corpus;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& body) {
  auto p = fs::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

std::string words_n(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(i);
  return s;
}

}  // namespace

TEST_CASE("load_pair") {
  SUBCASE("empty file") {
    auto p = temp_file("verve_empty.jsonl", "");
    CHECK(load_pair(p).empty());
  }
  SUBCASE("unknown label names line and value") {
    auto p = temp_file("verve_bad.jsonl",
                       R"({"id":"a","dataset":"PAIR","prompt":"p","response":"r","reflection_label":"NR","behavior_label":null})"
                       "\n"
                       R"({"id":"b","dataset":"PAIR","prompt":"p","response":"r","reflection_label":"XR","behavior_label":null})"
                       "\n");
    try {
      load_pair(p);
      FAIL("expected error");
    } catch (const std::exception& e) {
      std::string msg = e.what();
      CHECK(msg.find(":2:") != std::string::npos);
      CHECK(msg.find("XR") != std::string::npos);
    }
  }
  SUBCASE("malformed line") {
    auto p = temp_file("verve_malformed.jsonl", "{not json\n");
    CHECK_THROWS_WITH(load_pair(p), doctest::Contains(":1:"));
  }
  SUBCASE("missing label") {
    auto p = temp_file("verve_nolabel.jsonl",
                       R"({"id":"a","dataset":"PAIR","prompt":"p","response":"r","reflection_label":null,"behavior_label":null})"
                       "\n");
    CHECK_THROWS(load_pair(p));
  }
  SUBCASE("round trip") {
    auto data = synthesize_pair();
    auto p = fs::temp_directory_path() / "verve_rt.jsonl";
    write_jsonl(p, data);
    CHECK(load_pair(p) == data);
    fs::remove(p);
  }
}

TEST_CASE("synthetic PAIR stand-in has the published label counts") {
  auto data = synthesize_pair();
  CHECK(data.size() == 2544);
  auto c = count_labels(data);
  CHECK(c.by_label[Reflection::CR] == 636);
  CHECK(c.by_label[Reflection::SR] == 318);
  CHECK(c.by_label[Reflection::NR] == 1590);
  std::set<std::string> ids;
  for (const auto& e : data) {
    validate(e);
    ids.insert(e.id);
  }
  CHECK(ids.size() == data.size());
  CHECK(synthesize_pair() == data);
}

TEST_CASE("filter_annomi rules") {
  AnnomiFilter f;
  const std::string client16 = words_n(16);
  SUBCASE("15-word client dropped, 16 kept") {
    auto out = filter_annomi({{words_n(15), "so what would you like to do", "question", "t"},
                              {client16, "so what would you like to do", "question", "t"}}, f);
    REQUIRE(out.size() == 1);
    CHECK(out[0].prompt == client16);
    CHECK(out[0].reflection_label == Reflection::NR);
    CHECK(out[0].behavior_label == "question");
    CHECK(out[0].dataset == Dataset::AnnoMI);
  }
  SUBCASE("short counselor, reflections and interruptions dropped") {
    CHECK(filter_annomi({{client16, "I see.", "therapist input", "t"}}, f).empty());
    CHECK(filter_annomi({{client16, "you feel that it is hard", "reflection", "t"}}, f).empty());
    CHECK(filter_annomi({{"-" + client16, "so what would you like to do", "question", "t"}}, f).empty());
    CHECK(filter_annomi({{client16 + " -", "so what would you like to do", "question", "t"}}, f).empty());
  }
  SUBCASE("disfluencies do not count as words") {
    std::string client = "um " + words_n(15) + " uh";
    CHECK(filter_annomi({{client, "so what would you like to do", "question", "t"}}, f).empty());
    CHECK(strip_disfluencies("Um, I mean-- it was, uh, hard", f) == "it was, hard");
  }
  SUBCASE("idempotent") {
    std::vector<TurnPair> pairs{{"um " + client16, "uh so what would you like to do", "question", "a"},
                                {client16, "ok", "advice", "b"},
                                {words_n(20), "you could try going for walks", "advice", "c"}};
    auto once = filter_annomi(pairs, f);
    std::vector<TurnPair> again;
    for (const auto& e : once) again.push_back({e.prompt, e.response, *e.behavior_label, e.id});
    auto twice = filter_annomi(again, f);
    REQUIRE(twice.size() == once.size());
    for (std::size_t i = 0; i < once.size(); ++i) {
      CHECK(twice[i].prompt == once[i].prompt);
      CHECK(twice[i].response == once[i].response);
    }
  }
}

TEST_CASE("synthetic AnnoMI table flattens and filters to the expected scale") {
  auto p = fs::temp_directory_path() / "verve_annomi.csv";
  write_synthetic_annomi_csv(p, {});
  auto pairs = flatten_annomi_csv(p);
  CHECK(!pairs.empty());
  auto out = filter_annomi(pairs, {});
  MESSAGE("synthetic AnnoMI exchanges kept: " << out.size());
  CHECK(out.size() > 300);
  CHECK(out.size() < 650);
  for (const auto& e : out) {
    CHECK(verve::text::whitespace_tokens(e.prompt).size() >= 16);
    CHECK(verve::text::whitespace_tokens(e.response).size() >= 5);
  }
  fs::remove(p);
}

TEST_CASE("stratified split") {
  auto data = synthesize_pair();
  auto s = split(data, {}, 0);
  CHECK(s.train.size() == doctest::Approx(1908).epsilon(0.001));
  CHECK(s.dev.size() == doctest::Approx(127).epsilon(0.01));
  CHECK(s.test.size() == doctest::Approx(509).epsilon(0.002));
  CHECK(s.train.size() + s.dev.size() + s.test.size() == data.size());

  std::set<std::string> seen;
  for (const auto* part : {&s.train, &s.dev, &s.test})
    for (const auto& e : *part) CHECK(seen.insert(e.id).second);
  CHECK(seen.size() == data.size());

  auto again = split(data, {}, 0);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);

  CHECK_THROWS_AS(split(data, {0.5, 0.5, 0.5}, 0), std::invalid_argument);
  CHECK_THROWS_AS(split(data, {1.2, -0.1, -0.1}, 0), std::invalid_argument);

  auto total = count_labels(data);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto sp = split(data, {}, seed);
    for (const auto* part : {&sp.train, &sp.dev, &sp.test}) {
      auto c = count_labels(*part);
      for (auto r : kAllReflections) {
        const double expect = static_cast<double>(total.by_label[r]) * static_cast<double>(part->size()) /
                              static_cast<double>(data.size());
        CHECK(std::abs(static_cast<double>(c.by_label[r]) - expect) < 1.5);
      }
    }
  }
}
