#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace verve::text {

// English function words (NLTK-style list plus contractions).
bool is_stopword(std::string_view word);

enum class Pos { Noun, Adj, Verb, Adv, Pron, Det, Prep, Conj, Aux, Num, Punct, Other };

std::string_view pos_name(Pos p);

// Coarse part-of-speech tagging over normalized words.
class PosTagger {
 public:
  virtual ~PosTagger() = default;
  virtual std::vector<Pos> tag(std::span<const std::string> words) const = 0;
};

// Closed-class word lists, a small open-class lexicon, suffix rules and a
// couple of contextual fixes ("to"/modal + word => verb). Unknown open-class
// words default to nouns.
class LexiconTagger final : public PosTagger {
 public:
  std::vector<Pos> tag(std::span<const std::string> words) const override;
};

std::shared_ptr<const PosTagger> default_tagger();

}  // namespace verve::text
