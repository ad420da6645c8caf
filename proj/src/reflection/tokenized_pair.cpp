#include "verve/reflection/tokenized_pair.hpp"

#include <algorithm>
#include <stdexcept>

#include "verve/text/tokenize.hpp"

namespace verve::reflection {

std::size_t TokenizedPair::response_tokens() const {
  return static_cast<std::size_t>(std::count(segment.begin(), segment.end(), Segment::Response));
}

TokenizedPair tokenize_pair(const text::WordPiece& vocab, std::string_view prompt,
                            std::string_view response, std::size_t max_len) {
  if (max_len < 5) throw std::invalid_argument("max_len too small for a prompt/response pair");
  const auto resp_spans = text::tokenize_words(response);
  if (resp_spans.empty()) throw std::invalid_argument("response has no tokens");

  std::vector<std::string> resp_words;
  for (const auto& w : resp_spans) resp_words.push_back(w.text);
  auto prompt_pieces = vocab.encode(text::words(prompt));
  auto resp_pieces = vocab.encode(resp_words);

  TokenizedPair out;
  out.response_words = resp_words;
  const std::size_t budget = max_len - 3;
  if (prompt_pieces.size() + resp_pieces.size() > budget) {
    out.truncated = true;
    const std::size_t keep_prompt =
        std::min(prompt_pieces.size(), std::max(budget / 2, budget - std::min(budget, resp_pieces.size())));
    prompt_pieces.resize(keep_prompt);
    if (prompt_pieces.size() + resp_pieces.size() > budget) resp_pieces.resize(budget - prompt_pieces.size());
  }

  auto push = [&](text::TokenId id, Segment s, std::size_t w, std::pair<std::size_t, std::size_t> span) {
    out.tokens.push_back(id);
    out.segment.push_back(s);
    out.word.push_back(w);
    out.alignment.push_back(span);
  };
  push(text::kCls, Segment::Special, kNoWord, {0, 0});
  for (const auto& p : prompt_pieces) push(p.id, Segment::Prompt, kNoWord, {0, 0});
  push(text::kSep, Segment::Special, kNoWord, {0, 0});
  for (const auto& p : resp_pieces) {
    const auto& ws = resp_spans[p.word];
    std::pair<std::size_t, std::size_t> span{ws.begin, ws.end};
    // Byte offsets inside the word are exact only when normalization kept the length.
    if (ws.end - ws.begin == ws.text.size()) span = {ws.begin + p.begin, ws.begin + p.end};
    push(p.id, Segment::Response, p.word, span);
  }
  push(text::kSep, Segment::Special, kNoWord, {0, 0});
  return out;
}

}  // namespace verve::reflection
