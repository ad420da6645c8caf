#include "verve/metrics/keyphrase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "verve/text/stemmer.hpp"
#include "verve/text/tokenize.hpp"

namespace verve::metrics {

namespace {

double jaccard_distance(const Candidate& a, const Candidate& b) {
  std::set<std::string> sa(a.stems.begin(), a.stems.end()), sb(b.stems.begin(), b.stems.end());
  std::size_t inter = 0;
  for (const auto& s : sa) inter += sb.count(s);
  const std::size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 0.0 : 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

bool contains_run(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return needle.empty();
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

TopicGraph build_topic_graph(std::string_view raw, const text::PosTagger& tagger) {
  const auto words = text::words(raw);
  const auto tags = tagger.tag(words);
  TopicGraph g;
  std::map<std::string, std::size_t> by_key;
  std::size_t i = 0;
  while (i < words.size()) {
    auto content = [&](std::size_t k) { return tags[k] == text::Pos::Noun || tags[k] == text::Pos::Adj; };
    if (!content(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < words.size() && content(j)) ++j;
    std::vector<std::string> w(words.begin() + static_cast<std::ptrdiff_t>(i), words.begin() + static_cast<std::ptrdiff_t>(j));
    auto stems = text::stem_all(w);
    const auto key = text::join(stems);
    auto [it, fresh] = by_key.emplace(key, g.candidates.size());
    if (fresh) g.candidates.push_back({w, stems, {}});
    g.candidates[it->second].positions.push_back(i);
    i = j;
  }

  // Average-linkage agglomerative clustering on Jaccard distance of stem sets.
  const std::size_t n = g.candidates.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) d[a][b] = d[b][a] = jaccard_distance(g.candidates[a], g.candidates[b]);
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t a = 0; a < n; ++a) clusters.push_back({a});
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < clusters.size(); ++a)
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        double s = 0.0;
        for (auto x : clusters[a])
          for (auto y : clusters[b]) s += d[x][y];
        s /= static_cast<double>(clusters[a].size() * clusters[b].size());
        if (s < best) {
          best = s;
          ba = a;
          bb = b;
        }
      }
    if (best > kTopicDistanceThreshold) break;
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
    std::sort(clusters[ba].begin(), clusters[ba].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
  }
  g.topics = std::move(clusters);

  // Edge weight: sum of reciprocal gaps between occurrences of the two topics' candidates.
  const std::size_t t = g.topics.size();
  g.weights.assign(t, std::vector<double>(t, 0.0));
  for (std::size_t a = 0; a < t; ++a)
    for (std::size_t b = a + 1; b < t; ++b) {
      double w = 0.0;
      for (auto ca : g.topics[a])
        for (auto cb : g.topics[b])
          for (auto pa : g.candidates[ca].positions)
            for (auto pb : g.candidates[cb].positions) {
              std::size_t gap = pa < pb ? pb - pa - (g.candidates[ca].words.size() - 1)
                                        : pa - pb - (g.candidates[cb].words.size() - 1);
              w += 1.0 / static_cast<double>(std::max<std::size_t>(gap, 1));
            }
      g.weights[a][b] = g.weights[b][a] = w;
    }
  return g;
}

std::vector<double> rank_topics(const std::vector<std::vector<double>>& w, double damping) {
  const std::size_t n = w.size();
  if (n == 0) return {};
  // (I - damping * M) s = (1 - damping) / n, M[i][j] = w[j][i] / sum_k w[j][k] (1/n for dangling j).
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    double out = 0.0;
    for (std::size_t k = 0; k < n; ++k) out += w[j][k];
    for (std::size_t i = 0; i < n; ++i) {
      const double m = out > 0.0 ? w[j][i] / out : 1.0 / static_cast<double>(n);
      a[i][j] -= damping * m;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] += 1.0;
    a[i][n] = (1.0 - damping) / static_cast<double>(n);
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0.0) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> s(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += s[i] = a[i][n] / a[i][i];
  for (auto& v : s) v /= total;
  return s;
}

KeyphraseSet extract_keyphrases(std::string_view raw, const text::PosTagger& tagger) {
  const auto g = build_topic_graph(raw, tagger);
  KeyphraseSet out;
  if (g.candidates.empty()) {
    out.degenerate = true;
    return out;
  }
  const auto scores = rank_topics(g.weights);
  std::vector<std::size_t> order(g.topics.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto first_pos = [&](std::size_t topic) {
    std::size_t best = g.candidates[g.topics[topic].front()].positions.front();
    std::size_t cand = g.topics[topic].front();
    for (auto c : g.topics[topic])
      if (g.candidates[c].positions.front() < best) {
        best = g.candidates[c].positions.front();
        cand = c;
      }
    return std::make_pair(best, cand);
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return first_pos(a).first < first_pos(b).first;
  });
  for (auto t : order) {
    const auto& c = g.candidates[first_pos(t).second];
    out.phrases.push_back({text::join(c.words), c.stems, scores[t]});
  }
  return out;
}

KeyphraseSet extract_keyphrases(std::string_view raw) { return extract_keyphrases(raw, *text::default_tagger()); }

Coverage keyphrase_coverage(std::string_view original, std::string_view rewrite) {
  const auto ks = extract_keyphrases(original);
  if (ks.phrases.empty()) return {1.0, true};
  const auto hay = text::stem_all(text::words(rewrite));
  std::size_t found = 0;
  for (const auto& k : ks.phrases) found += contains_run(hay, k.stems) ? 1 : 0;
  return {static_cast<double>(found) / static_cast<double>(ks.phrases.size()), false};
}

}  // namespace verve::metrics
