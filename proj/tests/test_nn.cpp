#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <functional>
#include <random>

#include "verve/kernels/kernels.hpp"
#include "verve/nn/graph.hpp"
#include "verve/nn/transformer.hpp"

using namespace verve::nn;

namespace {

using Builder = std::function<Var(Graph&, std::vector<Var>&)>;

// Projects the op output onto a fixed random direction so every output
// element contributes to a scalar loss, then compares analytic gradients of
// all inputs against central differences in double.
void check_gradients(ParameterStore& store, const Builder& build, double tol = 2e-2) {
  Rng rng(99);
  auto params = store.all();
  auto loss_of = [&](bool do_backward) {
    Graph g;
    std::vector<Var> inputs;
    for (auto* p : params) inputs.push_back(g.param(*p));
    Var out = build(g, inputs);
    const Matrix& o = g.value(out);
    Rng proj_rng(7);
    std::normal_distribution<float> nd(0.0f, 1.0f);
    Matrix w(o.cols, 1);
    for (auto& x : w.data) x = nd(proj_rng);
    Var s = g.matmul(out, g.input(w));
    Var loss = g.mse(s, std::vector<float>(o.rows, 0.5f));
    if (do_backward) g.backward(loss);
    return static_cast<double>(g.value(loss).data[0]);
  };
  store.zero_grad();
  loss_of(true);
  for (auto* p : params) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const float orig = p->value.data[i];
      const float h = 1e-2f;
      p->value.data[i] = orig + h;
      const double up = loss_of(false);
      p->value.data[i] = orig - h;
      const double down = loss_of(false);
      p->value.data[i] = orig;
      const double fd = (up - down) / (2.0 * h);
      CAPTURE(p->name);
      CAPTURE(i);
      CHECK(p->grad.data[i] == doctest::Approx(fd).epsilon(tol).scale(1.0));
    }
  }
}

}  // namespace

TEST_CASE("elementwise and matmul gradients") {
  Rng rng(1);
  ParameterStore store;
  store.create("a", 3, 4, Init::Normal, rng, 0.8f);
  store.create("b", 4, 5, Init::Normal, rng, 0.8f);
  store.create("c", 5, 4, Init::Normal, rng, 0.8f);
  store.create("bias", 1, 5, Init::Normal, rng, 0.8f);

  SUBCASE("matmul + add_row + gelu") {
    check_gradients(store, [](Graph& g, std::vector<Var>& in) {
      return g.gelu(g.add_row(g.matmul(in[0], in[1]), in[3]));
    });
  }
  SUBCASE("matmul_nt + tanh + sigmoid + scale") {
    check_gradients(store, [](Graph& g, std::vector<Var>& in) {
      return g.scale(g.sigmoid(g.tanh(g.matmul_nt(in[0], in[2]))), 1.7f);
    });
  }
  SUBCASE("relu + add") {
    check_gradients(store, [](Graph& g, std::vector<Var>& in) {
      Var x = g.matmul(in[0], in[1]);
      return g.relu(g.add(x, x));
    });
  }
}

TEST_CASE("layer norm and gather gradients") {
  Rng rng(2);
  ParameterStore store;
  store.create("x", 4, 6, Init::Normal, rng, 1.0f);
  store.create("g", 1, 6, Init::Normal, rng, 1.0f);
  store.create("b", 1, 6, Init::Normal, rng, 1.0f);
  check_gradients(store, [](Graph& g, std::vector<Var>& in) {
    Var rows = g.gather_rows(in[0], {3, 0, 3, 1});
    return g.layer_norm(rows, in[1], in[2]);
  });
}

TEST_CASE("packed attention gradients, plain and causal") {
  Rng rng(3);
  ParameterStore store;
  store.create("q", 7, 8, Init::Normal, rng, 0.7f);
  store.create("k", 9, 8, Init::Normal, rng, 0.7f);
  store.create("v", 9, 8, Init::Normal, rng, 0.7f);
  SUBCASE("cross segments of different lengths") {
    std::vector<AttentionSegment> segs{{0, 3, 0, 5}, {3, 4, 5, 4}};
    check_gradients(store, [segs](Graph& g, std::vector<Var>& in) {
      return g.attention(in[0], in[1], in[2], segs, 2, false);
    });
  }
  SUBCASE("causal") {
    std::vector<AttentionSegment> segs{{0, 3, 0, 3}, {3, 4, 3, 4}};
    check_gradients(store, [segs](Graph& g, std::vector<Var>& in) {
      return g.attention(in[0], in[1], in[2], segs, 4, true);
    });
  }
}

TEST_CASE("cross entropy gradient ignores negative targets") {
  Rng rng(4);
  ParameterStore store;
  store.create("logits", 4, 5, Init::Normal, rng, 1.0f);
  Graph g;
  Var l = g.param(store.get("logits"));
  Var loss = g.cross_entropy(l, {1, -1, 4, 0});
  g.backward(loss);
  for (std::size_t j = 0; j < 5; ++j) CHECK(store.get("logits").grad(1, j) == 0.0f);

  // Compare against central differences.
  auto& p = store.get("logits");
  for (std::size_t i = 0; i < p.value.size(); ++i) {
    const float orig = p.value.data[i];
    auto eval = [&] {
      Graph h(false);
      return h.value(h.cross_entropy(h.param(p), {1, -1, 4, 0})).data[0];
    };
    p.value.data[i] = orig + 1e-2f;
    const double up = eval();
    p.value.data[i] = orig - 1e-2f;
    const double down = eval();
    p.value.data[i] = orig;
    CHECK(p.grad.data[i] == doctest::Approx((up - down) / 2e-2).epsilon(1e-2).scale(1.0));
  }
}

TEST_CASE("attention probabilities: causal mask, rows sum to one, recorded") {
  Rng rng(5);
  Matrix q(4, 4), k(4, 4), v(4, 4);
  std::normal_distribution<float> nd;
  for (auto* m : {&q, &k, &v})
    for (auto& x : m->data) x = nd(rng);
  Graph g(false);
  AttentionRecord rec;
  g.attention(g.input(q), g.input(k), g.input(v), {{0, 4, 0, 4}}, 2, true, &rec);
  REQUIRE(rec.probs.size() == 1);
  REQUIRE(rec.probs[0].size() == 2);
  for (const auto& p : rec.probs[0])
    for (std::size_t i = 0; i < 4; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < 4; ++j) {
        s += p(i, j);
        if (j > i) CHECK(p(i, j) == 0.0f);
      }
      CHECK(s == doctest::Approx(1.0));
    }
}

TEST_CASE("encoder/decoder forward agrees across kernel backends") {
  if (!verve::kernels::backend_available(verve::kernels::Backend::Avx2)) return;
  TransformerConfig cfg;
  cfg.vocab = 30;
  cfg.d_model = 16;
  cfg.heads = 2;
  cfg.d_ff = 24;
  cfg.max_len = 16;
  Rng rng(6);
  ParameterStore store;
  init_embeddings(store, "emb", cfg, rng);
  init_encoder(store, "enc", cfg, rng);
  init_decoder(store, "dec", cfg, rng);
  Packed src, tgt;
  src.add({2, 9, 10, 11, 3}, {0, 1, 1, 1, 0});
  src.add({2, 12, 3});
  tgt.add({5, 7, 8});
  tgt.add({5, 13});
  auto run = [&] {
    Graph g(false);
    Var mem = encoder(g, store, "enc", cfg, embed(g, store, "emb", src), src.self_segments(), nullptr);
    Var out = decoder(g, store, "dec", cfg, embed(g, store, "emb", tgt), tgt.self_segments(), mem,
                      cross_segments(tgt, src), nullptr);
    return g.value(out);
  };
  const auto before = verve::kernels::active_backend();
  verve::kernels::set_backend(verve::kernels::Backend::Scalar);
  Matrix a = run();
  verve::kernels::set_backend(verve::kernels::Backend::Avx2);
  Matrix b = run();
  verve::kernels::set_backend(before);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.data[i] == doctest::Approx(b.data[i]).epsilon(1e-4));
}

TEST_CASE("adam reduces a quadratic and parameters round-trip through disk") {
  Rng rng(8);
  ParameterStore store;
  store.create("w", 2, 3, Init::Normal, rng, 1.0f);
  AdamConfig ac;
  ac.lr = 0.05f;
  ac.warmup_steps = 0;
  Adam opt(ac);
  auto loss_val = [&] {
    double s = 0;
    for (float x : store.get("w").value.data) s += x * x;
    return s;
  };
  const double start = loss_val();
  for (int it = 0; it < 200; ++it) {
    Graph g;
    Var w = g.param(store.get("w"));
    Matrix one(3, 1, 1.0f);
    Var sq = g.matmul(g.add(w, w), g.input(one));  // keeps the test off mse-only paths
    (void)sq;
    auto& p = store.get("w");
    for (std::size_t i = 0; i < p.value.size(); ++i) p.grad.data[i] = 2.0f * p.value.data[i];
    opt.step(store);
  }
  CHECK(loss_val() < 0.01 * start);

  auto path = std::filesystem::temp_directory_path() / "verve_nn_weights.bin";
  store.save(path);
  ParameterStore other;
  Rng r2(123);
  other.create("w", 2, 3, Init::Zeros, r2);
  other.load(path);
  CHECK(other.fingerprint() == store.fingerprint());
  ParameterStore wrong;
  wrong.create("w", 3, 3, Init::Zeros, r2);
  CHECK_THROWS(wrong.load(path));
  std::filesystem::remove(path);
}
