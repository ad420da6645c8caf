#include "verve/text/wordpiece.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

namespace verve::text {

namespace {
constexpr std::string_view kCont = "##";
}

WordPiece::WordPiece() {
  for (const char* s : {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]", "[BOS]", "[EOS]"}) add(s);
}

void WordPiece::add(std::string token) {
  if (index_.contains(token)) return;
  index_.emplace(token, static_cast<TokenId>(tokens_.size()));
  tokens_.push_back(std::move(token));
}

TokenId WordPiece::id(std::string_view token) const {
  if (token == "<mask>") return kMask;
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

WordPiece WordPiece::build(const std::vector<std::vector<std::string>>& sentences, Options opt) {
  std::map<std::string, std::size_t> counts;
  for (const auto& s : sentences)
    for (const auto& w : s) ++counts[w];

  WordPiece wp;
  std::map<std::string, std::size_t> suffixes;
  std::map<std::string, std::size_t> chars;
  for (char ch = 'a'; ch <= 'z'; ++ch) chars[std::string(1, ch)] = 0;
  for (char ch = '0'; ch <= '9'; ++ch) chars[std::string(1, ch)] = 0;
  for (const auto& [w, c] : counts) {
    if (c >= opt.min_word_count) wp.add(w);
    for (std::size_t i = 0; i < w.size(); ++i) chars[std::string(1, w[i])] += c;
    for (std::size_t len = 1; len <= opt.max_suffix_len && len < w.size(); ++len)
      suffixes[w.substr(w.size() - len)] += c;
  }
  for (const auto& [ch, c] : chars) {
    wp.add(ch);
    wp.add(std::string(kCont) + ch);
  }
  for (const auto& [suf, c] : suffixes) {
    if (c >= opt.min_suffix_count) wp.add(std::string(kCont) + suf);
  }
  return wp;
}

std::vector<Piece> WordPiece::encode_word(std::string_view word, std::size_t word_index) const {
  std::vector<Piece> out;
  std::size_t start = 0;
  std::string buf;
  while (start < word.size()) {
    std::size_t end = word.size();
    TokenId found = -1;
    while (end > start) {
      buf.clear();
      if (start > 0) buf.append(kCont);
      buf.append(word.substr(start, end - start));
      auto it = index_.find(buf);
      if (it != index_.end()) {
        found = it->second;
        break;
      }
      --end;
    }
    if (found < 0) return {Piece{kUnk, word_index, 0, word.size()}};
    out.push_back(Piece{found, word_index, start, end});
    start = end;
  }
  return out;
}

std::vector<Piece> WordPiece::encode(const std::vector<std::string>& words) const {
  std::vector<Piece> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (words[i] == "<mask>") {
      out.push_back(Piece{kMask, i, 0, words[i].size()});
      continue;
    }
    auto ps = encode_word(words[i], i);
    out.insert(out.end(), ps.begin(), ps.end());
  }
  return out;
}

std::vector<TokenId> WordPiece::encode_ids(const std::vector<std::string>& words) const {
  std::vector<TokenId> ids;
  for (const auto& p : encode(words)) ids.push_back(p.id);
  return ids;
}

std::vector<std::string> WordPiece::decode_words(const std::vector<TokenId>& ids) const {
  std::vector<std::string> out;
  for (TokenId id : ids) {
    if (id == kMask) {
      out.emplace_back("<mask>");
      continue;
    }
    if (id < kNumSpecial && id != kUnk) continue;
    const std::string& t = token(id);
    if (t.starts_with(kCont) && !out.empty()) {
      out.back().append(t.substr(kCont.size()));
    } else if (t.starts_with(kCont)) {
      out.push_back(t.substr(kCont.size()));
    } else {
      out.push_back(t);
    }
  }
  return out;
}

void WordPiece::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write vocabulary: " + file.string());
  for (const auto& t : tokens_) out << t << '\n';
}

WordPiece WordPiece::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read vocabulary: " + file.string());
  WordPiece wp;
  wp.tokens_.clear();
  wp.index_.clear();
  std::string line;
  while (std::getline(in, line)) wp.add(line);
  if (wp.size() < kNumSpecial || wp.token(kMask) != "[MASK]")
    throw std::runtime_error("vocabulary file is missing reserved tokens: " + file.string());
  return wp;
}

}  // namespace verve::text
