#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "verve/corpus/annomi.hpp"
#include "verve/corpus/exchange.hpp"

namespace verve::corpus {

// Generator for a PAIR-shaped stand-in corpus: client prompts built from
// topic clauses (situation, outcome, belief) with several counselor responses
// each. Complex reflections name an inferred feeling or concern, simple
// reflections restate the client in second person, non-reflections are
// questions, advice or information.
struct SyntheticPairOptions {
  std::size_t complex_reflections = 636;
  std::size_t simple_reflections = 318;
  std::size_t non_reflections = 1590;
  // Fraction of each adjacent label pair (NR/SR, SR/CR) whose labels are
  // swapped; models annotator disagreement while keeping label counts fixed.
  double annotation_noise = 0.08;
  std::uint64_t seed = 17;
};

std::vector<Exchange> synthesize_pair(const SyntheticPairOptions& opt);
inline std::vector<Exchange> synthesize_pair() { return synthesize_pair(SyntheticPairOptions{}); }

// Expert-style complex reflection for each prompt of a synthesized corpus,
// keyed by prompt text. Built from the same prompt clauses but with a fresh
// template choice, so it is not a copy of the corpus CR.
struct ReferenceReflection {
  std::string prompt;
  std::string reflection;
};
std::vector<ReferenceReflection> synthesize_references(const SyntheticPairOptions& opt);

struct SyntheticAnnomiOptions {
  std::size_t transcripts = 133;
  std::size_t turns_per_transcript = 16;
  std::uint64_t seed = 29;
};

// Utterance table in the published AnnoMI column layout.
void write_synthetic_annomi_csv(const std::filesystem::path& path,
                                const SyntheticAnnomiOptions& opt);

}  // namespace verve::corpus
