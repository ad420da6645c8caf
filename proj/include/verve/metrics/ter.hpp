#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace verve::metrics {

// Unit-cost word edit distance (insert, delete, substitute).
std::size_t edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct TerStats {
  std::size_t edits = 0;   // edit distance after shifting
  std::size_t shifts = 0;  // block shifts applied, cost 1 each
  std::size_t ref_length = 0;
  double rate() const;     // (edits + shifts) / ref_length
};

// Translation edit rate of `hypothesis` against `reference` with Snover's
// greedy block shifts: repeatedly apply the shift of a hypothesis phrase
// (up to kMaxShiftSize words, matching the reference at the target spot and
// not already aligned there) that lowers the edit distance the most.
inline constexpr std::size_t kMaxShiftSize = 10;
TerStats ter_stats(const std::vector<std::string>& reference, const std::vector<std::string>& hypothesis,
                   bool allow_shifts = true);

// ter(original, rewrite): edits needed to turn the rewrite into the original,
// over the original's length. Throws std::invalid_argument on an empty original.
double ter(std::string_view original, std::string_view rewrite, bool allow_shifts = true);

}  // namespace verve::metrics
