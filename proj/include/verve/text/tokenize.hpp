#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace verve::text {

// A word of the normalized text together with its byte span in the raw input.
struct WordSpan {
  std::string text;  // lowercased
  std::size_t begin = 0;
  std::size_t end = 0;
};

// Splits on whitespace and separates sentence punctuation from words.
// Apostrophes and hyphens inside a word are kept ("you're", "mm-hmm").
// Output text is ASCII-lowercased; spans refer to the raw string.
std::vector<WordSpan> tokenize_words(std::string_view raw);

// Words of the normalized text.
std::vector<std::string> words(std::string_view raw);

// Lowercased, punctuation-separated, single-space-joined form. Templates
// reconstruct exactly this string.
std::string normalize(std::string_view raw);

// Whitespace-only tokens of the raw text, no case folding.
std::vector<std::string> whitespace_tokens(std::string_view raw);

std::string join(const std::vector<std::string>& parts, std::string_view sep = " ");

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

bool is_punctuation(std::string_view word);

// Joins normalized words back into readable text: no space before
// punctuation, first letter capitalized, standalone "i" upper-cased.
std::string detokenize(const std::vector<std::string>& words);

}  // namespace verve::text
