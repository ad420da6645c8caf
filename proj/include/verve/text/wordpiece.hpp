#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace verve::text {

using TokenId = std::int32_t;

// Reserved ids, identical in every vocabulary.
inline constexpr TokenId kPad = 0;
inline constexpr TokenId kUnk = 1;
inline constexpr TokenId kCls = 2;
inline constexpr TokenId kSep = 3;
inline constexpr TokenId kMask = 4;
inline constexpr TokenId kBos = 5;
inline constexpr TokenId kEos = 6;
inline constexpr TokenId kNumSpecial = 7;

struct Piece {
  TokenId id;
  std::size_t word;   // index of the source word
  std::size_t begin;  // byte offset inside the word
  std::size_t end;
};

// Greedy longest-match subword vocabulary. Whole words seen at least
// `min_count` times become tokens; remaining words split into prefixes and
// "##" continuation pieces drawn from frequent word suffixes and single
// characters.
class WordPiece {
 public:
  struct Options {
    std::size_t min_word_count = 2;
    std::size_t max_suffix_len = 4;
    std::size_t min_suffix_count = 3;
  };

  WordPiece();
  static WordPiece build(const std::vector<std::vector<std::string>>& sentences, Options opt);
  static WordPiece build(const std::vector<std::vector<std::string>>& sentences) {
    return build(sentences, Options{});
  }

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  TokenId id(std::string_view token) const;  // kUnk when absent

  // Pieces for one normalized word. `word_index` is copied into each piece.
  std::vector<Piece> encode_word(std::string_view word, std::size_t word_index) const;
  std::vector<Piece> encode(const std::vector<std::string>& words) const;
  std::vector<TokenId> encode_ids(const std::vector<std::string>& words) const;

  // Reassembles words from pieces; special tokens other than kMask are dropped,
  // kMask renders as "<mask>".
  std::vector<std::string> decode_words(const std::vector<TokenId>& ids) const;

  void save(const std::filesystem::path& file) const;
  static WordPiece load(const std::filesystem::path& file);

 private:
  void add(std::string token);
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

}  // namespace verve::text
