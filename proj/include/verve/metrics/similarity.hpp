#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace verve::metrics {

// Sentence BLEU-4 on a 0..100 scale with add-one smoothing of the 2..4-gram
// precisions (Lin and Och, 2004) and the usual brevity penalty.
double sentence_bleu(std::string_view hypothesis, std::string_view reference);
// Corpus BLEU-4 (0..100) from pooled n-gram statistics, unsmoothed.
double corpus_bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references);

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
};

// METEOR with exact then Porter-stem matching, greedy left-to-right
// alignment, Fmean = PR / (alpha P + (1 - alpha) R) and fragmentation
// penalty gamma * (chunks / matches)^beta. Range [0, 1).
double meteor(std::string_view hypothesis, std::string_view reference, const MeteorParams& p = {});

}  // namespace verve::metrics
