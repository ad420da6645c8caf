#include "verve/text/tokenize.hpp"

#include <cctype>

namespace verve::text {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Characters that always form their own token.
bool is_split_punct(char c) {
  switch (c) {
    case '.': case ',': case '?': case '!': case ';': case ':': case '"':
    case '(': case ')': case '[': case ']': case '{': case '}':
      return true;
    default:
      return false;
  }
}

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

}  // namespace

std::vector<WordSpan> tokenize_words(std::string_view raw) {
  std::vector<WordSpan> out;
  std::size_t i = 0;
  const std::size_t n = raw.size();
  while (i < n) {
    if (is_space(raw[i])) {
      ++i;
      continue;
    }
    if (is_split_punct(raw[i])) {
      // Runs of the same mark ("...", "?!") stay together.
      std::size_t j = i + 1;
      while (j < n && is_split_punct(raw[j]) && raw[j] != '"' && raw[j] != '(' && raw[j] != ')') ++j;
      out.push_back({std::string(raw.substr(i, j - i)), i, j});
      i = j;
      continue;
    }
    std::size_t j = i;
    while (j < n && !is_space(raw[j]) && !is_split_punct(raw[j])) ++j;
    // Leading/trailing quote marks and dashes are split off the word.
    std::size_t b = i;
    std::size_t e = j;
    while (b < e && (raw[b] == '\'' || raw[b] == '-')) ++b;
    while (e > b && (raw[e - 1] == '\'' || raw[e - 1] == '-')) --e;
    if (b > i) out.push_back({std::string(raw.substr(i, b - i)), i, b});
    if (e > b) {
      std::string w;
      w.reserve(e - b);
      for (std::size_t k = b; k < e; ++k) w.push_back(lower(raw[k]));
      // Typographic apostrophe normalizes to ASCII.
      std::string fixed;
      for (std::size_t k = 0; k < w.size(); ++k) {
        if (k + 2 < w.size() && static_cast<unsigned char>(w[k]) == 0xE2 &&
            static_cast<unsigned char>(w[k + 1]) == 0x80 &&
            static_cast<unsigned char>(w[k + 2]) == 0x99) {
          fixed.push_back('\'');
          k += 2;
        } else {
          fixed.push_back(w[k]);
        }
      }
      out.push_back({std::move(fixed), b, e});
    }
    if (j > e) out.push_back({std::string(raw.substr(e, j - e)), e, j});
    i = j;
  }
  return out;
}

std::vector<std::string> words(std::string_view raw) {
  std::vector<std::string> out;
  for (auto& w : tokenize_words(raw)) out.push_back(std::move(w.text));
  return out;
}

std::string normalize(std::string_view raw) { return join(words(raw)); }

std::vector<std::string> whitespace_tokens(std::string_view raw) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < raw.size()) {
    while (i < raw.size() && is_space(raw[i])) ++i;
    std::size_t j = i;
    while (j < raw.size() && !is_space(raw[j])) ++j;
    if (j > i) out.emplace_back(raw.substr(i, j - i));
    i = j;
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = lower(c);
  return out;
}

bool is_punctuation(std::string_view word) {
  if (word.empty()) return false;
  for (char c : word) {
    if (std::isalnum(static_cast<unsigned char>(c)) || static_cast<unsigned char>(c) >= 0x80) return false;
  }
  return true;
}

std::string detokenize(const std::vector<std::string>& ws) {
  std::string out;
  bool capitalize = true;
  for (const auto& w : ws) {
    if (w.empty()) continue;
    const bool punct = is_punctuation(w);
    if (!out.empty() && !(punct && w != "(" && w != "\"")) out.push_back(' ');
    std::string t = w;
    if (t == "i" || t.rfind("i'", 0) == 0) t[0] = 'I';
    if (capitalize && !punct) {
      t[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
      capitalize = false;
    }
    out += t;
    if (w == "." || w == "?" || w == "!") capitalize = true;
  }
  return out;
}

}  // namespace verve::text
