#include "verve/nn/graph.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "verve/kernels/kernels.hpp"

namespace verve::nn {

namespace {

void check(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

Var Graph::push(Matrix value, bool requires_grad) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad && grad_enabled_;
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

Matrix& Graph::grad(Var v) {
  Node& n = nodes_[v.id];
  if (n.grad.empty()) n.grad = Matrix(n.value.rows, n.value.cols);
  return n.grad;
}

Var Graph::input(Matrix value) { return push(std::move(value), false); }

Var Graph::param(Parameter& p) {
  Var v = push(p.value, true);
  if (!grad_enabled_) return v;
  nodes_[v.id].param = &p;
  return v;
}

Var Graph::matmul(Var a, Var b) {
  const Matrix& A = value(a);
  const Matrix& B = value(b);
  check(A.cols == B.rows, "matmul shape mismatch");
  const std::size_t M = A.rows, K = A.cols, N = B.cols;
  Matrix C(M, N);
  kernels::active().gemm_nn(M, N, K, A.data.data(), B.data.data(), C.data.data(), false);
  Var c = push(std::move(C), needs(a) || needs(b));
  nodes_[c.id].backward = [this, a, b, c, M, N, K] {
    const Matrix& dC = nodes_[c.id].grad;
    if (needs(a))
      kernels::active().gemm_nt(M, K, N, dC.data.data(), value(b).data.data(), grad(a).data.data(), true);
    if (needs(b))
      kernels::active().gemm_tn(K, N, M, value(a).data.data(), dC.data.data(), grad(b).data.data(), true);
  };
  return c;
}

Var Graph::matmul_nt(Var a, Var b) {
  const Matrix& A = value(a);
  const Matrix& B = value(b);
  check(A.cols == B.cols, "matmul_nt shape mismatch");
  const std::size_t M = A.rows, K = A.cols, N = B.rows;
  Matrix C(M, N);
  kernels::active().gemm_nt(M, N, K, A.data.data(), B.data.data(), C.data.data(), false);
  Var c = push(std::move(C), needs(a) || needs(b));
  nodes_[c.id].backward = [this, a, b, c, M, N, K] {
    const Matrix& dC = nodes_[c.id].grad;
    if (needs(a))
      kernels::active().gemm_nn(M, K, N, dC.data.data(), value(b).data.data(), grad(a).data.data(), true);
    if (needs(b))
      kernels::active().gemm_tn(N, K, M, dC.data.data(), value(a).data.data(), grad(b).data.data(), true);
  };
  return c;
}

Var Graph::add(Var a, Var b) {
  const Matrix& A = value(a);
  const Matrix& B = value(b);
  check(A.rows == B.rows && A.cols == B.cols, "add shape mismatch");
  Matrix C = A;
  kernels::active().axpy(1.0f, B.data.data(), C.data.data(), C.size());
  Var c = push(std::move(C), needs(a) || needs(b));
  nodes_[c.id].backward = [this, a, b, c] {
    const Matrix& dC = nodes_[c.id].grad;
    if (needs(a)) kernels::active().axpy(1.0f, dC.data.data(), grad(a).data.data(), dC.size());
    if (needs(b)) kernels::active().axpy(1.0f, dC.data.data(), grad(b).data.data(), dC.size());
  };
  return c;
}

Var Graph::add_row(Var a, Var bias) {
  const Matrix& A = value(a);
  const Matrix& Bv = value(bias);
  check(Bv.rows == 1 && Bv.cols == A.cols, "add_row shape mismatch");
  Matrix C = A;
  for (std::size_t r = 0; r < C.rows; ++r)
    kernels::active().axpy(1.0f, Bv.data.data(), C.row(r).data(), C.cols);
  Var c = push(std::move(C), needs(a) || needs(bias));
  nodes_[c.id].backward = [this, a, bias, c] {
    const Matrix& dC = nodes_[c.id].grad;
    if (needs(a)) kernels::active().axpy(1.0f, dC.data.data(), grad(a).data.data(), dC.size());
    if (needs(bias)) {
      Matrix& db = grad(bias);
      for (std::size_t r = 0; r < dC.rows; ++r)
        kernels::active().axpy(1.0f, dC.row(r).data(), db.data.data(), dC.cols);
    }
  };
  return c;
}

Var Graph::scale(Var a, float s) {
  Matrix C = value(a);
  kernels::active().scale(s, C.data.data(), C.size());
  Var c = push(std::move(C), needs(a));
  nodes_[c.id].backward = [this, a, c, s] {
    if (needs(a)) kernels::active().axpy(s, nodes_[c.id].grad.data.data(), grad(a).data.data(), value(a).size());
  };
  return c;
}

Var Graph::relu(Var a) {
  Matrix C = value(a);
  for (float& x : C.data) x = x > 0.0f ? x : 0.0f;
  Var c = push(std::move(C), needs(a));
  nodes_[c.id].backward = [this, a, c] {
    if (!needs(a)) return;
    const Matrix& dC = nodes_[c.id].grad;
    const Matrix& A = value(a);
    Matrix& dA = grad(a);
    for (std::size_t i = 0; i < A.size(); ++i)
      if (A.data[i] > 0.0f) dA.data[i] += dC.data[i];
  };
  return c;
}

Var Graph::gelu(Var a) {
  constexpr float k = 0.7978845608028654f;  // sqrt(2/pi)
  Matrix C = value(a);
  for (float& x : C.data) x = 0.5f * x * (1.0f + std::tanh(k * (x + 0.044715f * x * x * x)));
  Var c = push(std::move(C), needs(a));
  nodes_[c.id].backward = [this, a, c] {
    if (!needs(a)) return;
    const Matrix& dC = nodes_[c.id].grad;
    const Matrix& A = value(a);
    Matrix& dA = grad(a);
    for (std::size_t i = 0; i < A.size(); ++i) {
      const float x = A.data[i];
      const float t = std::tanh(k * (x + 0.044715f * x * x * x));
      const float d = 0.5f * (1.0f + t) + 0.5f * x * (1.0f - t * t) * k * (1.0f + 3.0f * 0.044715f * x * x);
      dA.data[i] += dC.data[i] * d;
    }
  };
  return c;
}

Var Graph::tanh(Var a) {
  Matrix C = value(a);
  for (float& x : C.data) x = std::tanh(x);
  Var c = push(std::move(C), needs(a));
  nodes_[c.id].backward = [this, a, c] {
    if (!needs(a)) return;
    const Matrix& dC = nodes_[c.id].grad;
    const Matrix& Y = value(c);
    Matrix& dA = grad(a);
    for (std::size_t i = 0; i < Y.size(); ++i) dA.data[i] += dC.data[i] * (1.0f - Y.data[i] * Y.data[i]);
  };
  return c;
}

Var Graph::sigmoid(Var a) {
  Matrix C = value(a);
  for (float& x : C.data) x = 1.0f / (1.0f + std::exp(-x));
  Var c = push(std::move(C), needs(a));
  nodes_[c.id].backward = [this, a, c] {
    if (!needs(a)) return;
    const Matrix& dC = nodes_[c.id].grad;
    const Matrix& Y = value(c);
    Matrix& dA = grad(a);
    for (std::size_t i = 0; i < Y.size(); ++i) dA.data[i] += dC.data[i] * Y.data[i] * (1.0f - Y.data[i]);
  };
  return c;
}

Var Graph::layer_norm(Var x, Var gamma, Var beta, float eps) {
  const Matrix& X = value(x);
  const std::size_t R = X.rows, N = X.cols;
  check(value(gamma).cols == N && value(beta).cols == N, "layer_norm shape mismatch");
  auto xhat = std::make_shared<Matrix>(R, N);
  auto rstd = std::make_shared<std::vector<float>>(R);
  Matrix Y(R, N);
  const float* g = value(gamma).data.data();
  const float* b = value(beta).data.data();
  for (std::size_t r = 0; r < R; ++r) {
    const float* xr = X.row(r).data();
    float mean = 0.0f;
    for (std::size_t j = 0; j < N; ++j) mean += xr[j];
    mean /= static_cast<float>(N);
    float var = 0.0f;
    for (std::size_t j = 0; j < N; ++j) var += (xr[j] - mean) * (xr[j] - mean);
    var /= static_cast<float>(N);
    const float rs = 1.0f / std::sqrt(var + eps);
    (*rstd)[r] = rs;
    for (std::size_t j = 0; j < N; ++j) {
      const float h = (xr[j] - mean) * rs;
      (*xhat)(r, j) = h;
      Y(r, j) = g[j] * h + b[j];
    }
  }
  Var y = push(std::move(Y), needs(x) || needs(gamma) || needs(beta));
  nodes_[y.id].backward = [this, x, gamma, beta, y, xhat, rstd, R, N] {
    const Matrix& dY = nodes_[y.id].grad;
    if (needs(gamma) || needs(beta)) {
      Matrix& dg = grad(gamma);
      Matrix& db = grad(beta);
      for (std::size_t r = 0; r < R; ++r)
        for (std::size_t j = 0; j < N; ++j) {
          dg.data[j] += dY(r, j) * (*xhat)(r, j);
          db.data[j] += dY(r, j);
        }
    }
    if (!needs(x)) return;
    const float* g = value(gamma).data.data();
    Matrix& dX = grad(x);
    std::vector<float> dxh(N);
    for (std::size_t r = 0; r < R; ++r) {
      float mean_d = 0.0f;
      float mean_dx = 0.0f;
      for (std::size_t j = 0; j < N; ++j) {
        dxh[j] = dY(r, j) * g[j];
        mean_d += dxh[j];
        mean_dx += dxh[j] * (*xhat)(r, j);
      }
      mean_d /= static_cast<float>(N);
      mean_dx /= static_cast<float>(N);
      for (std::size_t j = 0; j < N; ++j)
        dX(r, j) += (*rstd)[r] * (dxh[j] - mean_d - (*xhat)(r, j) * mean_dx);
    }
  };
  return y;
}

Var Graph::gather_rows(Var table, const std::vector<std::size_t>& rows) {
  const Matrix& T = value(table);
  Matrix C(rows.size(), T.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    check(rows[i] < T.rows, "gather_rows index out of range");
    std::copy_n(T.row(rows[i]).data(), T.cols, C.row(i).data());
  }
  Var c = push(std::move(C), needs(table));
  nodes_[c.id].backward = [this, table, c, rows] {
    if (!needs(table)) return;
    const Matrix& dC = nodes_[c.id].grad;
    Matrix& dT = grad(table);
    for (std::size_t i = 0; i < rows.size(); ++i)
      kernels::active().axpy(1.0f, dC.row(i).data(), dT.row(rows[i]).data(), dC.cols);
  };
  return c;
}

Var Graph::dropout(Var a, float p, Rng& rng) {
  if (p <= 0.0f) return a;
  const Matrix& A = value(a);
  auto mask = std::make_shared<std::vector<float>>(A.size());
  const float keep = 1.0f - p;
  Matrix C(A.rows, A.cols);
  for (std::size_t i = 0; i < A.size(); ++i) {
    const bool kept = static_cast<float>(rng() >> 40) * (1.0f / 16777216.0f) < keep;
    (*mask)[i] = kept ? 1.0f / keep : 0.0f;
    C.data[i] = A.data[i] * (*mask)[i];
  }
  Var c = push(std::move(C), needs(a));
  nodes_[c.id].backward = [this, a, c, mask] {
    if (!needs(a)) return;
    const Matrix& dC = nodes_[c.id].grad;
    Matrix& dA = grad(a);
    for (std::size_t i = 0; i < dC.size(); ++i) dA.data[i] += dC.data[i] * (*mask)[i];
  };
  return c;
}

namespace {

void copy_block(const Matrix& src, std::size_t row0, std::size_t rows, std::size_t col0,
                std::size_t cols, std::vector<float>& dst) {
  dst.resize(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    std::copy_n(src.data.data() + (row0 + r) * src.cols + col0, cols, dst.data() + r * cols);
}

void add_block(Matrix& dst, std::size_t row0, std::size_t rows, std::size_t col0, std::size_t cols,
               const std::vector<float>& src) {
  for (std::size_t r = 0; r < rows; ++r)
    kernels::active().axpy(1.0f, src.data() + r * cols, dst.data.data() + (row0 + r) * dst.cols + col0, cols);
}

}  // namespace

Var Graph::attention(Var q, Var k, Var v, const std::vector<AttentionSegment>& segments,
                     std::size_t heads, bool causal, AttentionRecord* record) {
  const Matrix& Q = value(q);
  const Matrix& K = value(k);
  const Matrix& V = value(v);
  check(Q.cols == K.cols && K.cols == V.cols && K.rows == V.rows, "attention shape mismatch");
  check(heads > 0 && Q.cols % heads == 0, "model width not divisible by heads");
  const std::size_t d = Q.cols;
  const std::size_t dh = d / heads;
  const float inv = 1.0f / std::sqrt(static_cast<float>(dh));

  auto probs = std::make_shared<std::vector<std::vector<Matrix>>>(segments.size());
  Matrix O(Q.rows, d);
  std::vector<float> qh, kh, vh, oh;
  const auto& kt = kernels::active();
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto& sg = segments[s];
    check(sg.q_offset + sg.q_len <= Q.rows && sg.k_offset + sg.k_len <= K.rows, "segment out of range");
    check(!causal || sg.q_len == sg.k_len, "causal attention needs square segments");
    (*probs)[s].resize(heads);
    for (std::size_t h = 0; h < heads; ++h) {
      copy_block(Q, sg.q_offset, sg.q_len, h * dh, dh, qh);
      copy_block(K, sg.k_offset, sg.k_len, h * dh, dh, kh);
      copy_block(V, sg.k_offset, sg.k_len, h * dh, dh, vh);
      Matrix P(sg.q_len, sg.k_len);
      kt.gemm_nt(sg.q_len, sg.k_len, dh, qh.data(), kh.data(), P.data.data(), false);
      kt.scale(inv, P.data.data(), P.size());
      for (std::size_t i = 0; i < sg.q_len; ++i) {
        auto row = P.row(i);
        if (causal)
          for (std::size_t j = i + 1; j < sg.k_len; ++j) row[j] = -std::numeric_limits<float>::infinity();
        kernels::softmax(row);
      }
      oh.assign(sg.q_len * dh, 0.0f);
      kt.gemm_nn(sg.q_len, dh, sg.k_len, P.data.data(), vh.data(), oh.data(), false);
      for (std::size_t r = 0; r < sg.q_len; ++r)
        std::copy_n(oh.data() + r * dh, dh, O.data.data() + (sg.q_offset + r) * d + h * dh);
      (*probs)[s][h] = std::move(P);
    }
  }
  if (record) {
    record->heads = heads;
    record->segments = segments;
    record->probs = *probs;
  }
  Var o = push(std::move(O), needs(q) || needs(k) || needs(v));
  nodes_[o.id].backward = [this, q, k, v, o, segments, heads, dh, inv, probs] {
    const Matrix& dO = nodes_[o.id].grad;
    const auto& kt = kernels::active();
    std::vector<float> qh, kh, vh, doh, dp, dqh, dkh, dvh;
    for (std::size_t s = 0; s < segments.size(); ++s) {
      const auto& sg = segments[s];
      for (std::size_t h = 0; h < heads; ++h) {
        const Matrix& P = (*probs)[s][h];
        copy_block(value(q), sg.q_offset, sg.q_len, h * dh, dh, qh);
        copy_block(value(k), sg.k_offset, sg.k_len, h * dh, dh, kh);
        copy_block(value(v), sg.k_offset, sg.k_len, h * dh, dh, vh);
        copy_block(dO, sg.q_offset, sg.q_len, h * dh, dh, doh);
        if (needs(v)) {
          dvh.assign(sg.k_len * dh, 0.0f);
          kt.gemm_tn(sg.k_len, dh, sg.q_len, P.data.data(), doh.data(), dvh.data(), false);
          add_block(grad(v), sg.k_offset, sg.k_len, h * dh, dh, dvh);
        }
        if (!needs(q) && !needs(k)) continue;
        dp.assign(sg.q_len * sg.k_len, 0.0f);
        kt.gemm_nt(sg.q_len, sg.k_len, dh, doh.data(), vh.data(), dp.data(), false);
        for (std::size_t i = 0; i < sg.q_len; ++i) {
          const float* pr = P.row(i).data();
          float* dr = dp.data() + i * sg.k_len;
          const float dotp = kt.dot(pr, dr, sg.k_len);
          for (std::size_t j = 0; j < sg.k_len; ++j) dr[j] = pr[j] * (dr[j] - dotp) * inv;
        }
        if (needs(q)) {
          dqh.assign(sg.q_len * dh, 0.0f);
          kt.gemm_nn(sg.q_len, dh, sg.k_len, dp.data(), kh.data(), dqh.data(), false);
          add_block(grad(q), sg.q_offset, sg.q_len, h * dh, dh, dqh);
        }
        if (needs(k)) {
          dkh.assign(sg.k_len * dh, 0.0f);
          kt.gemm_tn(sg.k_len, dh, sg.q_len, dp.data(), qh.data(), dkh.data(), false);
          add_block(grad(k), sg.k_offset, sg.k_len, h * dh, dh, dkh);
        }
      }
    }
  };
  return o;
}

Var Graph::cross_entropy(Var logits, const std::vector<int>& targets) {
  const Matrix& L = value(logits);
  check(targets.size() == L.rows, "cross_entropy target count mismatch");
  auto probs = std::make_shared<Matrix>(L);
  double loss = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < L.rows; ++r) {
    if (targets[r] < 0) continue;
    check(static_cast<std::size_t>(targets[r]) < L.cols, "cross_entropy target out of range");
    auto row = probs->row(r);
    kernels::softmax(row);
    loss -= std::log(std::max(row[static_cast<std::size_t>(targets[r])], 1e-30f));
    ++count;
  }
  Matrix out(1, 1, count ? static_cast<float>(loss / static_cast<double>(count)) : 0.0f);
  Var c = push(std::move(out), needs(logits));
  nodes_[c.id].backward = [this, logits, c, probs, targets, count] {
    if (!needs(logits) || count == 0) return;
    const float g = nodes_[c.id].grad.data[0] / static_cast<float>(count);
    Matrix& dL = grad(logits);
    for (std::size_t r = 0; r < probs->rows; ++r) {
      if (targets[r] < 0) continue;
      auto pr = probs->row(r);
      auto dr = dL.row(r);
      for (std::size_t j = 0; j < pr.size(); ++j) dr[j] += g * pr[j];
      dr[static_cast<std::size_t>(targets[r])] -= g;
    }
  };
  return c;
}

Var Graph::mse(Var pred, const std::vector<float>& targets) {
  const Matrix& P = value(pred);
  check(P.cols == 1 && P.rows == targets.size(), "mse shape mismatch");
  double loss = 0.0;
  for (std::size_t r = 0; r < P.rows; ++r) {
    const double e = P.data[r] - targets[r];
    loss += e * e;
  }
  const std::size_t n = P.rows;
  Matrix out(1, 1, n ? static_cast<float>(loss / static_cast<double>(n)) : 0.0f);
  Var c = push(std::move(out), needs(pred));
  nodes_[c.id].backward = [this, pred, c, targets, n] {
    if (!needs(pred) || n == 0) return;
    const float g = nodes_[c.id].grad.data[0];
    Matrix& dP = grad(pred);
    for (std::size_t r = 0; r < n; ++r)
      dP.data[r] += g * 2.0f * (value(pred).data[r] - targets[r]) / static_cast<float>(n);
  };
  return c;
}

void Graph::backward(Var loss) {
  check(value(loss).size() == 1, "backward needs a scalar loss");
  grad(loss).data[0] = 1.0f;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.empty() || !n.backward) continue;
    n.backward();
  }
  for (auto& n : nodes_) {
    if (n.param && !n.grad.empty())
      kernels::active().axpy(1.0f, n.grad.data.data(), n.param->grad.data.data(), n.grad.size());
  }
}

}  // namespace verve::nn
