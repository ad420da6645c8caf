#include "verve/paraphrase/paraphrase.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

#include "verve/text/tokenize.hpp"

namespace verve::paraphrase {

std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(text::words(a), text::words(b));
}

std::size_t select_paraphrase_index(std::string_view original, const std::vector<std::string>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("no paraphrase candidates");
  const auto orig = text::words(original);
  std::size_t best = 0;
  std::size_t best_d = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const std::size_t d = levenshtein(orig, text::words(candidates[i]));
    if (i == 0 || d > best_d) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

std::string select_paraphrase(std::string_view original, const std::vector<std::string>& candidates) {
  return candidates[select_paraphrase_index(original, candidates)];
}

std::vector<std::string> FallbackParaphraser::candidates(std::string_view response, std::size_t) const {
  return {std::string(response)};
}

namespace {

struct Rule {
  std::vector<std::string> from;
  std::vector<std::vector<std::string>> to;
};

std::vector<Rule> make_rules() {
  const std::vector<std::pair<std::string, std::vector<std::string>>> raw{
      {"it sounds like you feel", {"it seems you are feeling", "i hear that you feel", "you seem to feel"}},
      {"it sounds like", {"it seems", "i'm hearing that", "it seems to me"}},
      {"you're worried that", {"you are concerned that", "you fear that", "it worries you that"}},
      {"you're afraid that", {"you are scared that", "you fear that", "part of you worries that"}},
      {"you're saying that", {"what i hear is that", "you are telling me that", "in other words ,"}},
      {"leaves you feeling", {"makes you feel", "has you feeling", "leaves you"}},
      {"part of you believes", {"some part of you thinks", "you partly believe", "deep down you think"}},
      {"especially since", {"particularly because", "all the more since", "mostly because"}},
      {"even though", {"although", "despite the fact that", "even if"}},
      {"because", {"since", "given that", "as"}},
      {"you feel like", {"it feels to you like", "you have the sense that", "it seems to you that"}},
      {"you feel", {"you are feeling", "you're feeling", "you sense that you are"}},
      {"you think", {"you believe", "your view is that", "you suspect"}},
      {"you're", {"you are"}},
      {"you are", {"you're"}},
      {"it's", {"it is"}},
      {"don't", {"do not"}},
      {"can't", {"cannot", "are not able to"}},
      {"really", {"truly", "honestly"}},
      {"hard", {"difficult", "tough"}},
      {"worried", {"anxious", "concerned", "uneasy"}},
      {"afraid", {"scared", "fearful"}},
      {"upset", {"troubled", "distressed"}},
      {"frustrated", {"fed up", "annoyed"}},
      {"so", {"and so", "it seems"}},
      {"like", {"as if"}},
      {"when", {"whenever", "each time"}},
      {"want", {"would like", "wish"}},
  };
  std::vector<Rule> out;
  for (const auto& [from, tos] : raw) {
    Rule r{text::whitespace_tokens(from), {}};
    for (const auto& t : tos) r.to.push_back(text::whitespace_tokens(t));
    out.push_back(std::move(r));
  }
  return out;
}

const std::vector<Rule>& rules() {
  static const std::vector<Rule> r = make_rules();
  return r;
}

std::uint64_t fnv(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

std::vector<std::string> substitute(const std::vector<std::string>& words, std::mt19937_64& rng) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < words.size()) {
    bool done = false;
    for (const auto& r : rules()) {
      if (i + r.from.size() > words.size()) continue;
      if (!std::equal(r.from.begin(), r.from.end(), words.begin() + static_cast<std::ptrdiff_t>(i))) continue;
      // A matching rule is applied with probability 0.6; longer rules come first.
      if (rng() % 10 < 6) {
        const auto& to = r.to[rng() % r.to.size()];
        out.insert(out.end(), to.begin(), to.end());
        i += r.from.size();
        done = true;
      }
      break;
    }
    if (!done) out.push_back(words[i++]);
  }
  return out;
}

// "X , but Y ." -> "Y , even though X ." and "X , and Y ." -> "Y , and X ."
std::vector<std::string> reorder(const std::vector<std::string>& words) {
  std::vector<std::string> body = words;
  std::string final_punct;
  if (!body.empty() && text::is_punctuation(body.back())) {
    final_punct = body.back();
    body.pop_back();
  }
  for (std::size_t i = 1; i + 2 < body.size(); ++i) {
    if (body[i] != ",") continue;
    const std::string& conj = body[i + 1];
    if (conj != "but" && conj != "and") continue;
    std::vector<std::string> left(body.begin(), body.begin() + static_cast<std::ptrdiff_t>(i));
    std::vector<std::string> right(body.begin() + static_cast<std::ptrdiff_t>(i + 2), body.end());
    if (left.size() < 3 || right.size() < 3) continue;
    if (left.front() == "so") left.erase(left.begin());
    std::vector<std::string> out = right;
    out.push_back(",");
    if (conj == "but") {
      out.push_back("even");
      out.push_back("though");
    } else {
      out.push_back("and");
    }
    out.insert(out.end(), left.begin(), left.end());
    if (!final_punct.empty()) out.push_back(final_punct);
    return out;
  }
  return words;
}

}  // namespace

std::vector<std::string> LexicalParaphraser::candidates(std::string_view response, std::size_t n) const {
  const auto words = text::words(response);
  std::vector<std::string> out;
  for (std::size_t k = 0; k < n; ++k) {
    std::mt19937_64 rng(seed_ ^ fnv(text::normalize(response)) ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
    auto w = substitute(words, rng);
    if (rng() % 2 == 0) w = reorder(w);
    out.push_back(text::detokenize(w));
  }
  return out;
}

std::unique_ptr<Paraphraser> make_paraphraser(const std::string& model_id, std::uint64_t seed) {
  if (model_id == "lexical-v1") return std::make_unique<LexicalParaphraser>(seed);
  if (model_id == "fallback") return std::make_unique<FallbackParaphraser>();
  throw std::runtime_error("paraphrase model '" + model_id +
                           "' is unavailable; set the paraphrase model to \"fallback\" for offline mode "
                           "(the original response becomes the only candidate)");
}

std::vector<std::string> generate_paraphrases(const Paraphraser& model, std::string_view response, std::size_t n) {
  if (n == 0) throw std::invalid_argument("paraphrase count must be at least 1");
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (auto& c : model.candidates(response, n)) {
    const std::string key = text::join(text::whitespace_tokens(c));
    if (key.empty() || !seen.insert(key).second) continue;
    out.push_back(std::move(c));
    if (out.size() == n) break;
  }
  if (out.empty()) out.emplace_back(response);
  return out;
}

}  // namespace verve::paraphrase
