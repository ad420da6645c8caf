#include "verve/corpus/split.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

namespace verve::corpus {

DataSplit split(const std::vector<Exchange>& data, SplitRatios ratios, std::uint64_t seed) {
  if (ratios.train < 0 || ratios.dev < 0 || ratios.test < 0)
    throw std::invalid_argument("split ratios must be non-negative");
  if (std::abs(ratios.train + ratios.dev + ratios.test - 1.0) > 1e-9)
    throw std::invalid_argument("split ratios must sum to 1");

  // Stratum key: label index, or 3 for unlabeled.
  std::map<int, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const int key = data[i].reflection_label ? static_cast<int>(*data[i].reflection_label) : 3;
    strata[key].push_back(i);
  }

  std::mt19937_64 rng(seed);
  std::vector<int> assignment(data.size(), 2);
  // Cut points are rounded on cumulative counts so the split totals equal the
  // rounded global targets while each stratum stays within rounding.
  std::size_t cum = 0;
  long prev_b1 = 0;
  long prev_b2 = 0;
  for (auto& [key, idx] : strata) {
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng() % i]);
    cum += idx.size();
    const long b1 = std::lround(ratios.train * static_cast<double>(cum));
    const long b2 = std::lround((ratios.train + ratios.dev) * static_cast<double>(cum));
    const long size = static_cast<long>(idx.size());
    const long n_train = std::clamp(b1 - prev_b1, 0L, size);
    const long n_dev = std::clamp((b2 - b1) - (prev_b2 - prev_b1), 0L, size - n_train);
    prev_b1 = b1;
    prev_b2 = b2;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const long kk = static_cast<long>(k);
      assignment[idx[k]] = kk < n_train ? 0 : (kk < n_train + n_dev ? 1 : 2);
    }
  }

  DataSplit out;
  out.seed = seed;
  for (std::size_t i = 0; i < data.size(); ++i) {
    switch (assignment[i]) {
      case 0: out.train.push_back(data[i]); break;
      case 1: out.dev.push_back(data[i]); break;
      default: out.test.push_back(data[i]); break;
    }
  }
  return out;
}

}  // namespace verve::corpus
