#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "verve/text/wordpiece.hpp"

namespace verve::reflection {

enum class Segment : std::uint8_t { Special = 0, Prompt = 1, Response = 2 };

inline constexpr std::size_t kNoWord = static_cast<std::size_t>(-1);

// Encoder input "[CLS] prompt [SEP] response [SEP]" with per-token roles.
struct TokenizedPair {
  std::vector<text::TokenId> tokens;
  std::vector<Segment> segment;
  // Response word index of each RESPONSE token, kNoWord elsewhere.
  std::vector<std::size_t> word;
  // Byte span in the raw response for RESPONSE tokens; {0, 0} elsewhere.
  std::vector<std::pair<std::size_t, std::size_t>> alignment;
  // Normalized response words (all of them, even past a truncation point).
  std::vector<std::string> response_words;
  bool truncated = false;

  std::size_t size() const { return tokens.size(); }
  std::size_t response_tokens() const;
};

// Throws std::invalid_argument when the response has no words. When the pair
// exceeds `max_len` the prompt is first cut to half the budget, then the
// response tail is dropped; `truncated` records either.
TokenizedPair tokenize_pair(const text::WordPiece& vocab, std::string_view prompt,
                            std::string_view response, std::size_t max_len);

}  // namespace verve::reflection
