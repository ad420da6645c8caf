#include "verve/metrics/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "verve/text/stemmer.hpp"
#include "verve/text/tokenize.hpp"

namespace verve::metrics {

namespace {

using Words = std::vector<std::string>;

struct BleuStats {
  double match[4] = {0, 0, 0, 0};
  double total[4] = {0, 0, 0, 0};
  double hyp_len = 0;
  double ref_len = 0;
};

std::map<Words, std::size_t> ngrams(const Words& w, std::size_t n) {
  std::map<Words, std::size_t> out;
  for (std::size_t i = 0; i + n <= w.size(); ++i)
    ++out[Words(w.begin() + static_cast<std::ptrdiff_t>(i), w.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return out;
}

void accumulate(BleuStats& s, const Words& hyp, const Words& ref) {
  for (std::size_t n = 1; n <= 4; ++n) {
    const auto h = ngrams(hyp, n);
    const auto r = ngrams(ref, n);
    for (const auto& [g, c] : h) {
      const auto it = r.find(g);
      s.match[n - 1] += static_cast<double>(std::min(c, it == r.end() ? 0 : it->second));
    }
    s.total[n - 1] += static_cast<double>(hyp.size() >= n ? hyp.size() - n + 1 : 0);
  }
  s.hyp_len += static_cast<double>(hyp.size());
  s.ref_len += static_cast<double>(ref.size());
}

double bleu_from(const BleuStats& s, bool smooth) {
  if (s.hyp_len == 0) return 0.0;
  double log_p = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    double m = s.match[n], t = s.total[n];
    if (smooth && n > 0) {
      m += 1.0;
      t += 1.0;
    }
    if (m == 0.0 || t == 0.0) return 0.0;
    log_p += 0.25 * std::log(m / t);
  }
  const double bp = s.hyp_len >= s.ref_len ? 1.0 : std::exp(1.0 - s.ref_len / s.hyp_len);
  return 100.0 * bp * std::exp(log_p);
}

}  // namespace

double sentence_bleu(std::string_view hypothesis, std::string_view reference) {
  BleuStats s;
  accumulate(s, text::words(hypothesis), text::words(reference));
  return bleu_from(s, true);
}

double corpus_bleu(const std::vector<std::string>& hypotheses, const std::vector<std::string>& references) {
  if (hypotheses.size() != references.size()) throw std::invalid_argument("one reference per hypothesis required");
  BleuStats s;
  for (std::size_t i = 0; i < hypotheses.size(); ++i) accumulate(s, text::words(hypotheses[i]), text::words(references[i]));
  return bleu_from(s, false);
}

double meteor(std::string_view hypothesis, std::string_view reference, const MeteorParams& p) {
  const auto hyp = text::words(hypothesis);
  const auto ref = text::words(reference);
  if (hyp.empty() || ref.empty()) return 0.0;
  const auto hs = text::stem_all(hyp);
  const auto rs = text::stem_all(ref);

  std::vector<long> h2r(hyp.size(), -1);
  std::vector<bool> ref_used(ref.size(), false);
  auto stage = [&](const Words& a, const Words& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (h2r[i] >= 0) continue;
      for (std::size_t j = 0; j < b.size(); ++j)
        if (!ref_used[j] && a[i] == b[j]) {
          h2r[i] = static_cast<long>(j);
          ref_used[j] = true;
          break;
        }
    }
  };
  stage(hyp, ref);
  stage(hs, rs);

  double matches = 0.0, chunks = 0.0;
  long prev = -2;
  bool in_chunk = false;
  for (std::size_t i = 0; i < hyp.size(); ++i) {
    if (h2r[i] < 0) {
      in_chunk = false;
      continue;
    }
    matches += 1.0;
    if (!in_chunk || h2r[i] != prev + 1) chunks += 1.0;
    in_chunk = true;
    prev = h2r[i];
  }
  if (matches == 0.0) return 0.0;
  const double precision = matches / static_cast<double>(hyp.size());
  const double recall = matches / static_cast<double>(ref.size());
  const double fmean = precision * recall / (p.alpha * precision + (1.0 - p.alpha) * recall);
  const double penalty = p.gamma * std::pow(chunks / matches, p.beta);
  return fmean * (1.0 - penalty);
}

}  // namespace verve::metrics
