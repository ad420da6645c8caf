#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "verve/text/lexicon.hpp"

namespace verve::metrics {

struct Keyphrase {
  std::string surface;              // lowercased words of the first occurrence
  std::vector<std::string> stems;   // Porter stems of those words
  double score = 0.0;               // topic score
};

struct KeyphraseSet {
  std::vector<Keyphrase> phrases;   // one per topic, best topic first
  bool degenerate = false;          // no noun/adjective candidates
};

// Candidate = maximal run of nouns/adjectives; candidates sharing a stem
// sequence are merged with all their positions.
struct Candidate {
  std::vector<std::string> words;
  std::vector<std::string> stems;
  std::vector<std::size_t> positions;  // word offsets of each occurrence
};

struct TopicGraph {
  std::vector<Candidate> candidates;
  std::vector<std::vector<std::size_t>> topics;  // candidate indices
  std::vector<std::vector<double>> weights;      // symmetric, zero diagonal
};

inline constexpr double kTopicDistanceThreshold = 0.74;  // Jaccard distance cut
inline constexpr double kDamping = 0.85;

TopicGraph build_topic_graph(std::string_view text, const text::PosTagger& tagger);

// Weighted PageRank over a symmetric weight matrix; dangling topics spread
// uniformly; scores sum to 1. Solved as a dense linear system.
std::vector<double> rank_topics(const std::vector<std::vector<double>>& weights, double damping = kDamping);

KeyphraseSet extract_keyphrases(std::string_view text, const text::PosTagger& tagger);
KeyphraseSet extract_keyphrases(std::string_view text);

struct Coverage {
  double value = 1.0;
  bool degenerate = false;  // original had no keyphrases
};

// Fraction of the original's keyphrases whose stem sequence occurs
// contiguously in the rewrite's stems.
Coverage keyphrase_coverage(std::string_view original, std::string_view rewrite);

}  // namespace verve::metrics
