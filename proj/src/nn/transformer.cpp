#include "verve/nn/transformer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace verve::nn {

void Packed::add(const std::vector<std::size_t>& seq_ids, const std::vector<std::size_t>& seq_types) {
  if (!seq_types.empty() && seq_types.size() != seq_ids.size())
    throw std::invalid_argument("token types must match ids");
  offsets.push_back(ids.size());
  lengths.push_back(seq_ids.size());
  for (std::size_t i = 0; i < seq_ids.size(); ++i) {
    ids.push_back(seq_ids[i]);
    positions.push_back(i);
    types.push_back(seq_types.empty() ? 0 : seq_types[i]);
  }
}

std::vector<AttentionSegment> Packed::self_segments() const {
  std::vector<AttentionSegment> out;
  for (std::size_t i = 0; i < offsets.size(); ++i) out.push_back({offsets[i], lengths[i], offsets[i], lengths[i]});
  return out;
}

std::vector<AttentionSegment> cross_segments(const Packed& queries, const Packed& keys) {
  if (queries.sequences() != keys.sequences()) throw std::invalid_argument("cross attention batch mismatch");
  std::vector<AttentionSegment> out;
  for (std::size_t i = 0; i < queries.sequences(); ++i)
    out.push_back({queries.offsets[i], queries.lengths[i], keys.offsets[i], keys.lengths[i]});
  return out;
}

void init_linear(ParameterStore& store, const std::string& name, std::size_t in, std::size_t out, Rng& rng) {
  store.create(name + ".w", in, out, Init::Xavier, rng);
  store.create(name + ".b", 1, out, Init::Zeros, rng);
}

Var linear(Graph& g, ParameterStore& store, const std::string& name, Var x) {
  Var w = g.param(store.get(name + ".w"));
  Var b = g.param(store.get(name + ".b"));
  return g.add_row(g.matmul(x, w), b);
}

void init_layer_norm(ParameterStore& store, const std::string& name, std::size_t dim, Rng& rng) {
  store.create(name + ".g", 1, dim, Init::Ones, rng);
  store.create(name + ".b", 1, dim, Init::Zeros, rng);
}

Var layer_norm(Graph& g, ParameterStore& store, const std::string& name, Var x) {
  return g.layer_norm(x, g.param(store.get(name + ".g")), g.param(store.get(name + ".b")));
}

void init_embeddings(ParameterStore& store, const std::string& name, const TransformerConfig& cfg, Rng& rng) {
  store.create(name + ".tok", cfg.vocab, cfg.d_model, Init::Normal, rng, 0.05f);
  store.create(name + ".pos", cfg.max_len, cfg.d_model, Init::Normal, rng, 0.02f);
  store.create(name + ".type", cfg.type_vocab, cfg.d_model, Init::Normal, rng, 0.02f);
}

Var embed(Graph& g, ParameterStore& store, const std::string& name, const Packed& batch) {
  const auto& pos_table = store.get(name + ".pos").value;
  for (std::size_t p : batch.positions)
    if (p >= pos_table.rows) throw std::length_error("sequence longer than max_len");
  Var tok = g.gather_rows(g.param(store.get(name + ".tok")), batch.ids);
  Var pos = g.gather_rows(g.param(store.get(name + ".pos")), batch.positions);
  Var typ = g.gather_rows(g.param(store.get(name + ".type")), batch.types);
  return g.add(g.add(tok, pos), typ);
}

namespace {

std::string layer_name(const std::string& name, std::size_t l) { return name + ".l" + std::to_string(l); }

Var feed_forward(Graph& g, ParameterStore& store, const std::string& p, Var x, float dropout, Rng* rng) {
  Var h = g.gelu(linear(g, store, p + ".ff1", x));
  Var o = linear(g, store, p + ".ff2", h);
  return rng ? g.dropout(o, dropout, *rng) : o;
}

}  // namespace

void init_encoder(ParameterStore& store, const std::string& name, const TransformerConfig& cfg, Rng& rng) {
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const std::string p = layer_name(name, l);
    init_layer_norm(store, p + ".ln1", cfg.d_model, rng);
    init_linear(store, p + ".q", cfg.d_model, cfg.d_model, rng);
    init_linear(store, p + ".k", cfg.d_model, cfg.d_model, rng);
    init_linear(store, p + ".v", cfg.d_model, cfg.d_model, rng);
    init_linear(store, p + ".o", cfg.d_model, cfg.d_model, rng);
    init_layer_norm(store, p + ".ln2", cfg.d_model, rng);
    init_linear(store, p + ".ff1", cfg.d_model, cfg.d_ff, rng);
    init_linear(store, p + ".ff2", cfg.d_ff, cfg.d_model, rng);
  }
  init_layer_norm(store, name + ".lnf", cfg.d_model, rng);
}

Var encoder(Graph& g, ParameterStore& store, const std::string& name, const TransformerConfig& cfg,
            Var x, const std::vector<AttentionSegment>& segments, Rng* dropout_rng,
            std::vector<AttentionRecord>* records) {
  if (records) records->assign(cfg.layers, {});
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const std::string p = layer_name(name, l);
    Var h = layer_norm(g, store, p + ".ln1", x);
    Var a = g.attention(linear(g, store, p + ".q", h), linear(g, store, p + ".k", h),
                        linear(g, store, p + ".v", h), segments, cfg.heads, false,
                        records ? &(*records)[l] : nullptr);
    a = linear(g, store, p + ".o", a);
    if (dropout_rng) a = g.dropout(a, cfg.dropout, *dropout_rng);
    x = g.add(x, a);
    x = g.add(x, feed_forward(g, store, p, layer_norm(g, store, p + ".ln2", x), cfg.dropout, dropout_rng));
  }
  return layer_norm(g, store, name + ".lnf", x);
}

void init_decoder(ParameterStore& store, const std::string& name, const TransformerConfig& cfg, Rng& rng) {
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const std::string p = layer_name(name, l);
    init_layer_norm(store, p + ".ln1", cfg.d_model, rng);
    init_linear(store, p + ".q", cfg.d_model, cfg.d_model, rng);
    init_linear(store, p + ".k", cfg.d_model, cfg.d_model, rng);
    init_linear(store, p + ".v", cfg.d_model, cfg.d_model, rng);
    init_linear(store, p + ".o", cfg.d_model, cfg.d_model, rng);
    init_layer_norm(store, p + ".lnx", cfg.d_model, rng);
    init_linear(store, p + ".xq", cfg.d_model, cfg.d_model, rng);
    init_linear(store, p + ".xk", cfg.d_model, cfg.d_model, rng);
    init_linear(store, p + ".xv", cfg.d_model, cfg.d_model, rng);
    init_linear(store, p + ".xo", cfg.d_model, cfg.d_model, rng);
    init_layer_norm(store, p + ".ln2", cfg.d_model, rng);
    init_linear(store, p + ".ff1", cfg.d_model, cfg.d_ff, rng);
    init_linear(store, p + ".ff2", cfg.d_ff, cfg.d_model, rng);
  }
  init_layer_norm(store, name + ".lnf", cfg.d_model, rng);
}

Var decoder(Graph& g, ParameterStore& store, const std::string& name, const TransformerConfig& cfg,
            Var x, const std::vector<AttentionSegment>& self_segments, Var memory,
            const std::vector<AttentionSegment>& cross, Rng* dropout_rng) {
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const std::string p = layer_name(name, l);
    Var h = layer_norm(g, store, p + ".ln1", x);
    Var a = g.attention(linear(g, store, p + ".q", h), linear(g, store, p + ".k", h),
                        linear(g, store, p + ".v", h), self_segments, cfg.heads, true);
    a = linear(g, store, p + ".o", a);
    if (dropout_rng) a = g.dropout(a, cfg.dropout, *dropout_rng);
    x = g.add(x, a);

    h = layer_norm(g, store, p + ".lnx", x);
    Var c = g.attention(linear(g, store, p + ".xq", h), linear(g, store, p + ".xk", memory),
                        linear(g, store, p + ".xv", memory), cross, cfg.heads, false);
    c = linear(g, store, p + ".xo", c);
    if (dropout_rng) c = g.dropout(c, cfg.dropout, *dropout_rng);
    x = g.add(x, c);

    x = g.add(x, feed_forward(g, store, p, layer_norm(g, store, p + ".ln2", x), cfg.dropout, dropout_rng));
  }
  return layer_norm(g, store, name + ".lnf", x);
}

float Adam::current_lr() const {
  const float t = static_cast<float>(t_ + 1);
  float lr = cfg_.lr;
  if (cfg_.warmup_steps > 0 && t_ < cfg_.warmup_steps) lr *= t / static_cast<float>(cfg_.warmup_steps);
  if (cfg_.total_steps > cfg_.warmup_steps && t_ >= cfg_.warmup_steps) {
    const float frac = static_cast<float>(t_ - cfg_.warmup_steps) /
                       static_cast<float>(cfg_.total_steps - cfg_.warmup_steps);
    lr *= std::max(0.1f, 1.0f - 0.9f * frac);
  }
  return lr;
}

float Adam::step(ParameterStore& store) {
  auto params = store.all();
  double sq = 0.0;
  for (auto* p : params)
    for (float gv : p->grad.data) sq += static_cast<double>(gv) * gv;
  const float norm = static_cast<float>(std::sqrt(sq));
  const float clip = (cfg_.clip_norm > 0.0f && norm > cfg_.clip_norm) ? cfg_.clip_norm / norm : 1.0f;
  const float lr = current_lr();
  ++t_;
  const float bc1 = 1.0f - std::pow(cfg_.beta1, static_cast<float>(t_));
  const float bc2 = 1.0f - std::pow(cfg_.beta2, static_cast<float>(t_));
  for (auto* p : params) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const float gv = p->grad.data[i] * clip;
      float& m = p->m.data[i];
      float& v = p->v.data[i];
      m = cfg_.beta1 * m + (1.0f - cfg_.beta1) * gv;
      v = cfg_.beta2 * v + (1.0f - cfg_.beta2) * gv * gv;
      float upd = (m / bc1) / (std::sqrt(v / bc2) + cfg_.eps);
      if (cfg_.weight_decay > 0.0f && p->value.rows > 1) upd += cfg_.weight_decay * p->value.data[i];
      p->value.data[i] -= lr * upd;
    }
    p->grad.zero();
  }
  return norm;
}

}  // namespace verve::nn
