#include "verve/metrics/language_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "verve/text/tokenize.hpp"

namespace verve::metrics {

namespace {

constexpr char kSepChar = '\x1f';
const std::string kBos = "<s>";
const std::string kEos = "</s>";
const std::string kUnk = "<unk>";

std::string key(const std::vector<std::string>& w, std::size_t begin, std::size_t end) {
  std::string k;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) k += kSepChar;
    k += w[i];
  }
  return k;
}

}  // namespace

NgramLM NgramLM::train(const std::vector<std::string>& texts, std::size_t order, double discount) {
  if (order == 0) throw std::invalid_argument("n-gram order must be positive");
  if (!(discount > 0.0 && discount < 1.0)) throw std::invalid_argument("discount must lie in (0,1)");
  NgramLM lm;
  lm.order_ = order;
  lm.discount_ = discount;
  lm.counts_.assign(order + 1, {});
  lm.ctx_total_.assign(order + 1, {});
  lm.ctx_types_.assign(order + 1, {});

  std::vector<std::vector<std::string>> sents;
  for (const auto& t : texts) {
    auto w = text::words(t);
    if (w.empty()) continue;
    for (const auto& x : w) lm.vocab_.emplace(x, lm.vocab_.size());
    std::vector<std::string> s(order - 1, kBos);
    s.insert(s.end(), w.begin(), w.end());
    s.push_back(kEos);
    sents.push_back(std::move(s));
  }
  lm.vocab_.emplace(kEos, lm.vocab_.size());
  lm.vocab_size_ = lm.vocab_.size() + 1;  // + <unk>

  // Highest order: raw counts. Below: number of distinct left extensions.
  std::vector<std::set<std::string>> types(order + 1);
  for (const auto& s : sents)
    for (std::size_t i = order - 1; i < s.size(); ++i) {
      lm.counts_[order][key(s, i + 1 - order, i + 1)] += 1.0;
      for (std::size_t n = 1; n < order; ++n) {
        // (n+1)-gram ending at i; its type adds one continuation to the n-gram suffix.
        if (types[n + 1].insert(key(s, i - n, i + 1)).second) lm.counts_[n][key(s, i + 1 - n, i + 1)] += 1.0;
      }
    }
  for (std::size_t n = 1; n <= order; ++n)
    for (const auto& [g, c] : lm.counts_[n]) {
      const auto pos = g.rfind(kSepChar);
      const std::string ctx = pos == std::string::npos ? std::string() : g.substr(0, pos);
      lm.ctx_total_[n][ctx] += c;
      lm.ctx_types_[n][ctx] += 1.0;
    }
  return lm;
}

double NgramLM::prob(std::size_t n, const std::vector<std::string>& ctx, std::size_t begin, const std::string& w) const {
  if (n == 0) return 1.0 / static_cast<double>(vocab_size_);
  const std::string h = key(ctx, begin, ctx.size());
  const auto tot = ctx_total_[n].find(h);
  const double lower = prob(n - 1, ctx, begin + 1, w);
  if (tot == ctx_total_[n].end()) return lower;
  const std::string g = h.empty() ? w : h + kSepChar + w;
  const auto c = counts_[n].find(g);
  const double count = c == counts_[n].end() ? 0.0 : c->second;
  const double types = ctx_types_[n].at(h);
  return std::max(count - discount_, 0.0) / tot->second + discount_ * types / tot->second * lower;
}

double NgramLM::log_prob(const std::vector<std::string>& history, const std::string& word) const {
  std::vector<std::string> ctx(order_ - 1, kBos);
  for (const auto& h : history) ctx.push_back(vocab_.count(h) || h == kBos ? h : kUnk);
  ctx.erase(ctx.begin(), ctx.end() - static_cast<std::ptrdiff_t>(order_ - 1));
  const std::string w = vocab_.count(word) ? word : kUnk;
  return std::log(prob(order_, ctx, 0, w));
}

double NgramLM::perplexity(std::string_view raw) const {
  const auto w = text::words(raw);
  if (w.empty()) throw std::invalid_argument("perplexity of empty text");
  double nll = 0.0;
  std::vector<std::string> hist;
  for (const auto& x : w) {
    nll -= log_prob(hist, x);
    hist.push_back(x);
  }
  return std::exp(nll / static_cast<double>(w.size()));
}

nlohmann::json NgramLM::to_json() const {
  nlohmann::json counts = nlohmann::json::array();
  for (std::size_t n = 0; n <= order_; ++n) {
    std::vector<std::pair<std::string, double>> rows(counts_[n].begin(), counts_[n].end());
    std::sort(rows.begin(), rows.end());
    counts.push_back(rows);
  }
  std::vector<std::string> vocab(vocab_.size());
  for (const auto& [w, i] : vocab_) vocab[i] = w;
  return {{"order", order_}, {"discount", discount_}, {"vocab", vocab}, {"counts", counts}};
}

NgramLM NgramLM::from_json(const nlohmann::json& j) {
  NgramLM lm;
  lm.order_ = j.at("order").get<std::size_t>();
  lm.discount_ = j.at("discount").get<double>();
  for (const auto& w : j.at("vocab")) lm.vocab_.emplace(w.get<std::string>(), lm.vocab_.size());
  lm.vocab_size_ = lm.vocab_.size() + 1;
  lm.counts_.assign(lm.order_ + 1, {});
  lm.ctx_total_.assign(lm.order_ + 1, {});
  lm.ctx_types_.assign(lm.order_ + 1, {});
  for (std::size_t n = 0; n <= lm.order_; ++n)
    for (const auto& row : j.at("counts").at(n)) lm.counts_[n][row.at(0).get<std::string>()] = row.at(1).get<double>();
  for (std::size_t n = 1; n <= lm.order_; ++n)
    for (const auto& [g, c] : lm.counts_[n]) {
      const auto pos = g.rfind(kSepChar);
      const std::string ctx = pos == std::string::npos ? std::string() : g.substr(0, pos);
      lm.ctx_total_[n][ctx] += c;
      lm.ctx_types_[n][ctx] += 1.0;
    }
  return lm;
}

}  // namespace verve::metrics
