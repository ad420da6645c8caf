#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "verve/corpus/exchange.hpp"

namespace verve::corpus {

// One client utterance followed by the counselor utterance that answered it.
struct TurnPair {
  std::string client;
  std::string counselor;
  std::string behavior;  // counselor behavior code, e.g. "question", "reflection"
  std::string source_id;
};

struct AnnomiFilter {
  // Matched case-insensitively against whole whitespace tokens (trailing
  // commas/periods ignored). Multi-word entries match token runs.
  std::vector<std::string> disfluencies{"um", "uh", "mm", "mm-hmm", "i mean--"};
  std::size_t min_client_words = 16;
  std::size_t min_counselor_words = 5;
};

// Removes disfluency tokens and re-joins with single spaces.
std::string strip_disfluencies(const std::string& text, const AnnomiFilter& cfg);

// Keeps non-reflection counselor turns that survive the interruption and
// length rules. Resulting exchanges are AnnoMI / NR with the behavior label
// carried over.
std::vector<Exchange> filter_annomi(const std::vector<TurnPair>& pairs, const AnnomiFilter& cfg);

// Minimal RFC 4180 reader (quoted fields, embedded newlines, doubled quotes).
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

// Flattens the published AnnoMI utterance table (columns transcript_id,
// utterance_id, interlocutor, utterance_text, main_therapist_behaviour) into
// consecutive client -> therapist pairs.
std::vector<TurnPair> flatten_annomi_csv(const std::filesystem::path& path);

std::string normalize_behavior(std::string_view raw);

}  // namespace verve::corpus
