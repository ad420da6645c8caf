#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace verve::paraphrase {

// Unit-cost word-level edit distance.
std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b);
// Over normalized words of both texts.
std::size_t levenshtein(std::string_view a, std::string_view b);

// Index of the candidate farthest from `original`; ties go to the lowest
// index. Throws std::invalid_argument on an empty list.
std::size_t select_paraphrase_index(std::string_view original, const std::vector<std::string>& candidates);
std::string select_paraphrase(std::string_view original, const std::vector<std::string>& candidates);

class Paraphraser {
 public:
  virtual ~Paraphraser() = default;
  virtual std::string id() const = 0;
  // Raw model output, possibly with duplicates.
  virtual std::vector<std::string> candidates(std::string_view response, std::size_t n) const = 0;
};

// Offline mode: the original response is the only candidate.
class FallbackParaphraser final : public Paraphraser {
 public:
  std::string id() const override { return "fallback"; }
  std::vector<std::string> candidates(std::string_view response, std::size_t n) const override;
};

// Phrase-table paraphraser: multiword substitutions from a hand-built table
// of reflective phrasings plus clause reordering around "but"/"even though"/
// "and". Candidate k is drawn with a generator seeded from the text and k.
class LexicalParaphraser final : public Paraphraser {
 public:
  explicit LexicalParaphraser(std::uint64_t seed = 0) : seed_(seed) {}
  std::string id() const override { return "lexical-v1"; }
  std::vector<std::string> candidates(std::string_view response, std::size_t n) const override;

 private:
  std::uint64_t seed_;
};

// Known ids: "lexical-v1", "fallback". Anything else throws
// std::runtime_error telling the caller to use the offline fallback.
std::unique_ptr<Paraphraser> make_paraphraser(const std::string& model_id, std::uint64_t seed = 0);

// Up to n distinct (after whitespace normalization) non-empty candidates; the
// original is returned when the model yields nothing usable. n >= 1.
std::vector<std::string> generate_paraphrases(const Paraphraser& model, std::string_view response, std::size_t n = 5);

}  // namespace verve::paraphrase
