#pragma once

// Reverse-mode autodiff tape over row-major matrices. A Graph lives for one
// forward/backward pass; parameters are read at node creation and their
// gradients accumulated on backward().

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "verve/nn/tensor.hpp"

namespace verve::nn {

struct Var {
  std::size_t id = static_cast<std::size_t>(-1);
};

// One sequence inside a packed attention call: query rows
// [q_offset, q_offset+q_len) attend to key rows [k_offset, k_offset+k_len).
struct AttentionSegment {
  std::size_t q_offset = 0;
  std::size_t q_len = 0;
  std::size_t k_offset = 0;
  std::size_t k_len = 0;
};

// Softmax probabilities of one attention call, per segment and head, each a
// q_len x k_len row-major block.
struct AttentionRecord {
  std::size_t heads = 0;
  std::vector<AttentionSegment> segments;
  std::vector<std::vector<Matrix>> probs;  // [segment][head]
};

class Graph {
 public:
  Graph() = default;
  // With grad disabled no backward closures are recorded (inference).
  explicit Graph(bool grad_enabled) : grad_enabled_(grad_enabled) {}
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var input(Matrix value);
  Var param(Parameter& p);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  Matrix& grad(Var v);
  std::size_t size() const { return nodes_.size(); }

  Var matmul(Var a, Var b);     // [M,K] x [K,N]
  Var matmul_nt(Var a, Var b);  // [M,K] x [N,K]^T
  Var add(Var a, Var b);
  Var add_row(Var a, Var bias);  // bias [1,N] broadcast over rows
  Var scale(Var a, float s);
  Var relu(Var a);
  Var gelu(Var a);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var layer_norm(Var x, Var gamma, Var beta, float eps = 1e-5f);
  Var gather_rows(Var table, const std::vector<std::size_t>& rows);
  Var dropout(Var a, float p, Rng& rng);

  // Packed multi-head scaled dot-product attention. q/k/v are [rows, d] with
  // d divisible by `heads`; `causal` masks keys after the query position
  // (segments must then have q_len == k_len).
  Var attention(Var q, Var k, Var v, const std::vector<AttentionSegment>& segments,
                std::size_t heads, bool causal, AttentionRecord* record = nullptr);

  // Mean token cross-entropy over rows whose target is >= 0. Returns [1,1].
  Var cross_entropy(Var logits, const std::vector<int>& targets);
  // Mean squared error against per-row targets of a [N,1] prediction.
  Var mse(Var pred, const std::vector<float>& targets);

  // Seeds d(loss)/d(loss) = 1 and runs the tape backwards. Parameter
  // gradients are accumulated (not overwritten).
  void backward(Var loss);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Parameter* param = nullptr;
    std::function<void()> backward;
  };

  Var push(Matrix value, bool requires_grad);
  bool needs(Var v) const { return nodes_[v.id].requires_grad; }

  std::vector<Node> nodes_;
  bool grad_enabled_ = true;
};

}  // namespace verve::nn
