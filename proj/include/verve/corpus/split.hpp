#pragma once

#include <cstdint>
#include <vector>

#include "verve/corpus/exchange.hpp"

namespace verve::corpus {

struct SplitRatios {
  double train = 0.75;
  double dev = 0.05;
  double test = 0.20;
};

struct DataSplit {
  std::vector<Exchange> train;
  std::vector<Exchange> dev;
  std::vector<Exchange> test;
  std::uint64_t seed = 0;
};

// Deterministic split stratified by reflection label (unlabeled exchanges form
// their own stratum). Each stratum is shuffled with a seed-derived generator
// and cut by largest-remainder rounding, so per-label counts differ from the
// exact ratio by less than one. Throws std::invalid_argument when the ratios
// are negative or do not sum to 1 within 1e-9.
DataSplit split(const std::vector<Exchange>& data, SplitRatios ratios, std::uint64_t seed);

}  // namespace verve::corpus
