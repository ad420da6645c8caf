#include "verve/rewriter/rewriter.hpp"

#include <cmath>

namespace verve::rewriter {

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::Improved:
      return "IMPROVED";
    case StopReason::BudgetExhausted:
      return "BUDGET_EXHAUSTED";
    case StopReason::NoopTemplate:
      return "NOOP_TEMPLATE";
  }
  return "BUDGET_EXHAUSTED";
}

std::string_view to_string(StopRule r) { return r == StopRule::Improvement ? "improvement" : "inter_attempt"; }

StopRule parse_stop_rule(std::string_view s) {
  if (s == "improvement") return StopRule::Improvement;
  if (s == "inter_attempt") return StopRule::InterAttempt;
  throw std::invalid_argument("unknown stop rule: " + std::string(s));
}

void to_json(nlohmann::json& j, const LoopConfig& c) {
  j = nlohmann::json{{"base_weight", c.base_weight},
                     {"step", c.step},
                     {"max_attempts", c.max_attempts},
                     {"threshold", c.threshold},
                     {"rule", to_string(c.rule)}};
}

void from_json(const nlohmann::json& j, LoopConfig& c) {
  const LoopConfig d;
  c.base_weight = j.value("base_weight", d.base_weight);
  c.step = j.value("step", d.step);
  c.max_attempts = j.value("max_attempts", d.max_attempts);
  c.threshold = j.value("threshold", d.threshold);
  c.rule = parse_stop_rule(j.value("rule", std::string(to_string(d.rule))));
  if (c.max_attempts == 0) throw std::invalid_argument("max_attempts must be at least 1");
  if (c.step < 0.0) throw std::invalid_argument("step must be non-negative");
  if (content_weight_at(c, c.max_attempts - 1) <= 0.0)
    throw std::invalid_argument("content weight would reach zero within the attempt budget");
}

double content_weight_at(const LoopConfig& cfg, std::size_t k) {
  const double c = cfg.base_weight - static_cast<double>(k) * cfg.step;
  return std::round(c * 1e9) / 1e9;
}

nlohmann::json to_json(const RewriteResult& r, std::string_view sentinel) {
  nlohmann::json attempts = nlohmann::json::array();
  for (const auto& a : r.attempts)
    attempts.push_back({{"content_weight", a.content_weight},
                        {"template", templating::to_json(a.tmpl)},
                        {"rendered_template", templating::render_template(a.tmpl, sentinel)},
                        {"candidate", a.candidate},
                        {"score", a.score}});
  return {{"original_score", r.original_score},
          {"attempts", attempts},
          {"final", r.final_text},
          {"final_score", r.final_score},
          {"improvement", r.improvement},
          {"stopped_reason", to_string(r.stopped_reason)}};
}

RewriteAttempt rewrite_once(const Backend& backend, std::string_view prompt, std::string_view response,
                            double content_weight) {
  RewriteAttempt a;
  a.content_weight = content_weight;
  try {
    a.tmpl = backend.make_template(prompt, response, content_weight);
    a.candidate = a.tmpl.noop ? std::string(response) : backend.fill(prompt, a.tmpl);
    a.score = backend.score(prompt, a.candidate);
  } catch (const RewriteError&) {
    throw;
  } catch (const std::exception& e) {
    throw RewriteError("rewrite attempt at C=" + std::to_string(content_weight) + " failed: " + e.what(),
                       content_weight);
  }
  return a;
}

RewriteResult rewrite(const Backend& backend, std::string_view prompt, std::string_view response,
                      const LoopConfig& cfg) {
  return rewrite(backend, prompt, response, backend.score(prompt, response), cfg);
}

RewriteResult rewrite(const Backend& backend, std::string_view prompt, std::string_view response,
                      double original_score, const LoopConfig& cfg) {
  if (cfg.max_attempts == 0) throw std::invalid_argument("max_attempts must be at least 1");
  RewriteResult r;
  r.original_score = original_score;
  r.stopped_reason = StopReason::BudgetExhausted;
  double previous = original_score;
  for (std::size_t k = 0; k < cfg.max_attempts; ++k) {
    r.attempts.push_back(rewrite_once(backend, prompt, response, content_weight_at(cfg, k)));
    const auto& a = r.attempts.back();
    if (a.tmpl.noop) {
      r.stopped_reason = StopReason::NoopTemplate;
      break;
    }
    const double delta = a.score - (cfg.rule == StopRule::Improvement ? original_score : previous);
    previous = a.score;
    if (delta > cfg.threshold) {
      r.stopped_reason = StopReason::Improved;
      break;
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < r.attempts.size(); ++i)
    if (r.attempts[i].score > r.attempts[best].score) best = i;
  const auto& b = r.attempts[best];
  if (r.stopped_reason == StopReason::NoopTemplate || b.score <= original_score) {
    // Never hand back something scored worse than what the counselor wrote.
    r.final_text = std::string(response);
    r.final_score = original_score;
    r.improvement = 0.0;
    if (r.stopped_reason == StopReason::Improved) r.stopped_reason = StopReason::BudgetExhausted;
  } else {
    r.final_text = b.candidate;
    r.final_score = b.score;
    r.improvement = b.score - original_score;
  }
  return r;
}

generator::ExtractorFn attention_extractor(const reflection::Discriminator& disc, reflection::AttentionOptions opt) {
  return [&disc, opt](std::string_view prompt, std::string_view response, double c) {
    return templating::make_template(disc.extract_attention(prompt, response, opt), c);
  };
}

generator::ExtractorFn drg_extractor(templating::SalienceTable table, double threshold) {
  return [table = std::move(table), threshold](std::string_view, std::string_view response, double c) {
    auto t = templating::drg_extract(response, table, threshold);
    t.content_weight = c;
    return t;
  };
}

generator::ExtractorFn tg_extractor(templating::SalienceTable table, double gamma, double threshold) {
  return [table = std::move(table), gamma, threshold](std::string_view, std::string_view response, double c) {
    auto t = templating::tg_extract(response, table, gamma, threshold);
    t.content_weight = c;
    return t;
  };
}

templating::Template ModelBackend::make_template(std::string_view prompt, std::string_view response,
                                                 double content_weight) const {
  return extractor_(prompt, response, content_weight);
}

std::string ModelBackend::fill(std::string_view prompt, const templating::Template& tmpl) const {
  return gen_.fill(prompt, tmpl, decoding_);
}

double ModelBackend::score(std::string_view prompt, std::string_view response) const {
  return scorer_.score(prompt, response);
}

}  // namespace verve::rewriter
