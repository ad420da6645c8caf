#include "verve/metrics/ter.hpp"

#include <algorithm>
#include <stdexcept>

#include "verve/text/tokenize.hpp"

namespace verve::metrics {

namespace {

using Words = std::vector<std::string>;

struct Alignment {
  std::size_t distance = 0;
  std::vector<bool> ref_ok;           // reference word matched exactly
  std::vector<bool> hyp_ok;           // hypothesis word matched exactly
  std::vector<std::size_t> hyp_pos;   // hypothesis index where each reference word is realized
};

Alignment align(const Words& ref, const Words& hyp) {
  const std::size_t r = ref.size(), h = hyp.size();
  std::vector<std::vector<std::size_t>> d(r + 1, std::vector<std::size_t>(h + 1));
  for (std::size_t i = 0; i <= r; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= h; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= r; ++i)
    for (std::size_t j = 1; j <= h; ++j)
      d[i][j] = std::min({d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1), d[i - 1][j] + 1, d[i][j - 1] + 1});

  Alignment a;
  a.distance = d[r][h];
  a.ref_ok.assign(r, false);
  a.hyp_ok.assign(h, false);
  a.hyp_pos.assign(r, 0);
  // Trace back, preferring diagonal moves.
  std::vector<char> ops;
  std::size_t i = r, j = h;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      ops.push_back(ref[i - 1] == hyp[j - 1] ? 'M' : 'S');
      --i;
      --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ops.push_back('D');
      --i;
    } else {
      ops.push_back('I');
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());
  std::size_t ri = 0, hi = 0;
  for (char op : ops) {
    if (op == 'M' || op == 'S') {
      a.hyp_pos[ri] = hi;
      if (op == 'M') a.ref_ok[ri] = a.hyp_ok[hi] = true;
      ++ri;
      ++hi;
    } else if (op == 'D') {
      a.hyp_pos[ri++] = hi;
    } else {
      ++hi;
    }
  }
  return a;
}

}  // namespace

std::size_t edit_distance(const Words& a, const Words& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = std::min({prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1), prev[j] + 1, cur[j - 1] + 1});
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double TerStats::rate() const {
  return static_cast<double>(edits + shifts) / static_cast<double>(ref_length);
}

TerStats ter_stats(const Words& ref, const Words& hyp_in, bool allow_shifts) {
  TerStats st;
  st.ref_length = ref.size();
  Words hyp = hyp_in;
  if (!allow_shifts) {
    st.edits = edit_distance(ref, hyp);
    return st;
  }
  while (true) {
    const auto a = align(ref, hyp);
    std::size_t best_dist = a.distance;
    Words best_hyp;
    for (std::size_t i = 0; i < hyp.size(); ++i) {
      for (std::size_t len = 1; len <= kMaxShiftSize && i + len <= hyp.size(); ++len) {
        if (std::all_of(a.hyp_ok.begin() + static_cast<std::ptrdiff_t>(i),
                        a.hyp_ok.begin() + static_cast<std::ptrdiff_t>(i + len), [](bool b) { return b; }))
          continue;
        for (std::size_t j = 0; j + len <= ref.size(); ++j) {
          if (!std::equal(hyp.begin() + static_cast<std::ptrdiff_t>(i), hyp.begin() + static_cast<std::ptrdiff_t>(i + len),
                          ref.begin() + static_cast<std::ptrdiff_t>(j)))
            continue;
          if (std::all_of(a.ref_ok.begin() + static_cast<std::ptrdiff_t>(j),
                          a.ref_ok.begin() + static_cast<std::ptrdiff_t>(j + len), [](bool b) { return b; }))
            continue;
          const std::size_t target = a.hyp_pos[j];
          if (target >= i && target <= i + len) continue;
          Words moved(hyp.begin(), hyp.begin() + static_cast<std::ptrdiff_t>(i));
          moved.insert(moved.end(), hyp.begin() + static_cast<std::ptrdiff_t>(i + len), hyp.end());
          const std::size_t at = target > i ? target - len : target;
          moved.insert(moved.begin() + static_cast<std::ptrdiff_t>(at), hyp.begin() + static_cast<std::ptrdiff_t>(i),
                       hyp.begin() + static_cast<std::ptrdiff_t>(i + len));
          const std::size_t dist = edit_distance(ref, moved);
          if (dist < best_dist) {
            best_dist = dist;
            best_hyp = std::move(moved);
          }
        }
      }
    }
    if (best_hyp.empty()) {
      st.edits = a.distance;
      return st;
    }
    hyp = std::move(best_hyp);
    ++st.shifts;
  }
}

double ter(std::string_view original, std::string_view rewrite, bool allow_shifts) {
  const auto ref = text::words(original);
  if (ref.empty()) throw std::invalid_argument("TER needs a non-empty original");
  return ter_stats(ref, text::words(rewrite), allow_shifts).rate();
}

}  // namespace verve::metrics
