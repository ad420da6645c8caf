#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "verve/nn/graph.hpp"
#include "verve/nn/tensor.hpp"

namespace verve::nn {

struct TransformerConfig {
  std::size_t vocab = 0;
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t d_ff = 128;
  std::size_t layers = 2;
  std::size_t max_len = 192;
  std::size_t type_vocab = 3;
  float dropout = 0.1f;
};

// Several sequences packed row-wise. Each sequence attends only to itself.
struct Packed {
  std::vector<std::size_t> ids;
  std::vector<std::size_t> positions;
  std::vector<std::size_t> types;
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> lengths;

  void add(const std::vector<std::size_t>& seq_ids, const std::vector<std::size_t>& seq_types = {});
  std::size_t rows() const { return ids.size(); }
  std::size_t sequences() const { return offsets.size(); }
  std::vector<AttentionSegment> self_segments() const;
};

// Cross-attention segments: sequence i of `queries` attends to sequence i of `keys`.
std::vector<AttentionSegment> cross_segments(const Packed& queries, const Packed& keys);

void init_linear(ParameterStore& store, const std::string& name, std::size_t in, std::size_t out, Rng& rng);
Var linear(Graph& g, ParameterStore& store, const std::string& name, Var x);

void init_layer_norm(ParameterStore& store, const std::string& name, std::size_t dim, Rng& rng);
Var layer_norm(Graph& g, ParameterStore& store, const std::string& name, Var x);

// Token, position and token-type embeddings under "<name>.tok", ".pos", ".type".
void init_embeddings(ParameterStore& store, const std::string& name, const TransformerConfig& cfg, Rng& rng);
Var embed(Graph& g, ParameterStore& store, const std::string& name, const Packed& batch);

// Pre-LN encoder stack; returns the final layer-normed hidden states.
// `records`, when given, receives one AttentionRecord per layer.
void init_encoder(ParameterStore& store, const std::string& name, const TransformerConfig& cfg, Rng& rng);
Var encoder(Graph& g, ParameterStore& store, const std::string& name, const TransformerConfig& cfg,
            Var x, const std::vector<AttentionSegment>& segments, Rng* dropout_rng,
            std::vector<AttentionRecord>* records = nullptr);

// Pre-LN decoder stack with causal self-attention and cross-attention to `memory`.
void init_decoder(ParameterStore& store, const std::string& name, const TransformerConfig& cfg, Rng& rng);
Var decoder(Graph& g, ParameterStore& store, const std::string& name, const TransformerConfig& cfg,
            Var x, const std::vector<AttentionSegment>& self_segments, Var memory,
            const std::vector<AttentionSegment>& cross, Rng* dropout_rng);

struct AdamConfig {
  float lr = 1e-3f;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float eps = 1e-8f;
  float weight_decay = 0.0f;
  float clip_norm = 1.0f;
  std::size_t warmup_steps = 100;
  std::size_t total_steps = 0;  // 0: constant after warmup, else linear decay to 10%
};

class Adam {
 public:
  explicit Adam(AdamConfig cfg) : cfg_(cfg) {}
  // Clips, applies one update to every parameter and zeroes gradients.
  // Returns the pre-clip global gradient norm.
  float step(ParameterStore& store);
  float current_lr() const;
  std::size_t steps() const { return t_; }

 private:
  AdamConfig cfg_;
  std::size_t t_ = 0;
};

}  // namespace verve::nn
