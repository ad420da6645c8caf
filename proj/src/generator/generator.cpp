#include "verve/generator/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "verve/kernels/kernels.hpp"
#include "verve/nn/checkpoint.hpp"
#include "verve/nn/graph.hpp"
#include "verve/text/tokenize.hpp"

namespace verve::generator {

namespace {

constexpr float kNegInf = -std::numeric_limits<float>::infinity();

std::size_t count_separators(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t pos = s.find(kSeparator); pos != std::string_view::npos; pos = s.find(kSeparator, pos + 1)) ++n;
  return n;
}

}  // namespace

std::string make_input(std::string_view prompt, std::string_view rendered_template) {
  if (count_separators(prompt) || count_separators(rendered_template))
    throw std::invalid_argument("prompt or template contains the separator token");
  return text::trim(prompt) + " " + std::string(kSeparator) + " " + text::trim(rendered_template);
}

std::pair<std::string, std::string> split_input(std::string_view input_text) {
  if (count_separators(input_text) != 1) throw std::invalid_argument("input must contain exactly one separator");
  const std::size_t pos = input_text.find(kSeparator);
  return {text::trim(input_text.substr(0, pos)), text::trim(input_text.substr(pos + kSeparator.size()))};
}

void validate(const TrainingExample& ex) {
  split_input(ex.input_text);
  if (text::trim(ex.target_text).empty()) throw std::invalid_argument("training target is empty");
}

TrainingExample build_training_example(const corpus::Exchange& ex, bool use_paraphrase, const ExtractorFn& extractor,
                                       double content_weight, const paraphrase::Paraphraser& paraphraser,
                                       std::size_t n_paraphrases) {
  if (!ex.reflection_label) throw std::invalid_argument("generator training needs labeled exchanges: " + ex.id);
  if (!corpus::is_reflection(*ex.reflection_label))
    throw std::invalid_argument("generator is trained on reflections only; " + ex.id + " is NR");
  std::string source = ex.response;
  bool augmented = false;
  if (use_paraphrase) {
    const auto cands = paraphrase::generate_paraphrases(paraphraser, ex.response, n_paraphrases);
    source = paraphrase::select_paraphrase(ex.response, cands);
    augmented = text::normalize(source) != text::normalize(ex.response);
  }
  const auto tmpl = extractor(ex.prompt, source, content_weight);
  TrainingExample out;
  out.input_text = make_input(ex.prompt, templating::render_template(tmpl));
  out.target_text = ex.response;
  out.augmented = augmented;
  return out;
}

void to_json(nlohmann::json& j, const GeneratorConfig& c) {
  j = nlohmann::json{{"d_model", c.d_model},
                     {"heads", c.heads},
                     {"d_ff", c.d_ff},
                     {"layers", c.layers},
                     {"max_source_len", c.max_source_len},
                     {"max_target_len", c.max_target_len},
                     {"dropout", c.dropout},
                     {"epochs", c.epochs},
                     {"batch_size", c.batch_size},
                     {"lr", c.lr},
                     {"weight_decay", c.weight_decay},
                     {"warmup_steps", c.warmup_steps},
                     {"seed", c.seed},
                     {"vocab_min_count", c.vocab_min_count}};
}

void from_json(const nlohmann::json& j, GeneratorConfig& c) {
  const GeneratorConfig d;
  c.d_model = j.value("d_model", d.d_model);
  c.heads = j.value("heads", d.heads);
  c.d_ff = j.value("d_ff", d.d_ff);
  c.layers = j.value("layers", d.layers);
  c.max_source_len = j.value("max_source_len", d.max_source_len);
  c.max_target_len = j.value("max_target_len", d.max_target_len);
  c.dropout = j.value("dropout", d.dropout);
  c.epochs = j.value("epochs", d.epochs);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.lr = j.value("lr", d.lr);
  c.weight_decay = j.value("weight_decay", d.weight_decay);
  c.warmup_steps = j.value("warmup_steps", d.warmup_steps);
  c.seed = j.value("seed", d.seed);
  c.vocab_min_count = j.value("vocab_min_count", d.vocab_min_count);
  if (c.heads == 0 || c.d_model % c.heads != 0) throw std::invalid_argument("d_model must be divisible by heads");
  if (c.max_target_len < 2 || c.max_source_len < 4) throw std::invalid_argument("sequence limits too small");
}

GeneratorModel::GeneratorModel(text::WordPiece vocab, const GeneratorConfig& cfg) : vocab_(std::move(vocab)), cfg_(cfg) {
  nn::Rng rng(cfg.seed);
  const auto tc = net_config();
  nn::init_embeddings(store_, "emb", tc, rng);
  nn::init_encoder(store_, "enc", tc, rng);
  nn::init_decoder(store_, "dec", tc, rng);
  store_.create("out.b", 1, vocab_.size(), nn::Init::Zeros, rng);
}

nn::TransformerConfig GeneratorModel::net_config() const {
  nn::TransformerConfig t;
  t.vocab = vocab_.size();
  t.d_model = cfg_.d_model;
  t.heads = cfg_.heads;
  t.d_ff = cfg_.d_ff;
  t.layers = cfg_.layers;
  t.max_len = std::max(cfg_.max_source_len, cfg_.max_target_len);
  t.type_vocab = 2;
  t.dropout = cfg_.dropout;
  return t;
}

std::vector<std::size_t> GeneratorModel::source_ids(std::string_view input_text) const {
  const auto [prompt, tmpl] = split_input(input_text);
  auto to_ids = [&](const std::string& s) {
    std::vector<std::size_t> out;
    for (auto id : vocab_.encode_ids(text::words(s))) out.push_back(static_cast<std::size_t>(id));
    return out;
  };
  auto p = to_ids(prompt);
  auto t = to_ids(tmpl);
  const std::size_t budget = cfg_.max_source_len - 2;
  if (t.size() > budget / 2 && p.size() + t.size() > budget) t.resize(std::max(budget / 2, budget - std::min(p.size(), budget / 2)));
  if (p.size() + t.size() > budget) p.resize(budget - t.size());
  std::vector<std::size_t> ids = p;
  ids.push_back(static_cast<std::size_t>(text::kSep));
  ids.insert(ids.end(), t.begin(), t.end());
  ids.push_back(static_cast<std::size_t>(text::kEos));
  return ids;
}

std::vector<std::size_t> GeneratorModel::target_ids(std::string_view target_text) const {
  std::vector<std::size_t> out;
  for (auto id : vocab_.encode_ids(text::words(target_text))) out.push_back(static_cast<std::size_t>(id));
  if (out.size() > cfg_.max_target_len - 1) out.resize(cfg_.max_target_len - 1);
  out.push_back(static_cast<std::size_t>(text::kEos));
  return out;
}

namespace {

std::vector<std::size_t> source_types(const std::vector<std::size_t>& ids) {
  std::vector<std::size_t> types(ids.size(), 0);
  bool after = false;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    types[i] = after ? 1 : 0;
    if (ids[i] == static_cast<std::size_t>(text::kSep)) after = true;
  }
  return types;
}

}  // namespace

nn::Var GeneratorModel::forward_loss(nn::Graph& g, const std::vector<const TrainingExample*>& batch,
                                     nn::Rng* dropout_rng) const {
  nn::Packed src, dec;
  std::vector<int> targets;
  for (const auto* ex : batch) {
    const auto s = source_ids(ex->input_text);
    src.add(s, source_types(s));
    const auto t = target_ids(ex->target_text);
    std::vector<std::size_t> in{static_cast<std::size_t>(text::kBos)};
    in.insert(in.end(), t.begin(), t.end() - 1);
    dec.add(in);
    for (auto id : t) targets.push_back(static_cast<int>(id));
  }
  const auto tc = net_config();
  nn::Var x = nn::embed(g, store_, "emb", src);
  if (dropout_rng) x = g.dropout(x, cfg_.dropout, *dropout_rng);
  nn::Var mem = nn::encoder(g, store_, "enc", tc, x, src.self_segments(), dropout_rng);
  nn::Var y = nn::embed(g, store_, "emb", dec);
  if (dropout_rng) y = g.dropout(y, cfg_.dropout, *dropout_rng);
  nn::Var h = nn::decoder(g, store_, "dec", tc, y, dec.self_segments(), mem, nn::cross_segments(dec, src), dropout_rng);
  nn::Var logits = g.add_row(g.matmul_nt(h, g.param(store_.get("emb.tok"))), g.param(store_.get("out.b")));
  return g.cross_entropy(logits, targets);
}

double GeneratorModel::loss(const std::vector<TrainingExample>& data) const {
  if (data.empty()) return 0.0;
  double total = 0.0;
  std::size_t tokens = 0;
  for (std::size_t s = 0; s < data.size(); s += 32) {
    std::vector<const TrainingExample*> batch;
    std::size_t n = 0;
    for (std::size_t k = s; k < std::min(data.size(), s + 32); ++k) {
      batch.push_back(&data[k]);
      n += target_ids(data[k].target_text).size();
    }
    nn::Graph g(false);
    total += g.value(forward_loss(g, batch, nullptr)).data[0] * static_cast<double>(n);
    tokens += n;
  }
  return total / static_cast<double>(tokens);
}

GeneratorModel GeneratorModel::train(const std::vector<TrainingExample>& train, const std::vector<TrainingExample>& dev,
                                     const GeneratorConfig& cfg, std::vector<EpochLoss>* log,
                                     const std::function<void(const EpochLoss&)>& on_epoch) {
  if (train.empty()) throw std::invalid_argument("generator training set is empty");
  for (const auto& ex : train) validate(ex);
  for (const auto& ex : dev) validate(ex);

  std::vector<std::vector<std::string>> sentences;
  for (const auto& ex : train) {
    const auto [p, t] = split_input(ex.input_text);
    sentences.push_back(text::words(p));
    sentences.push_back(text::words(t));
    sentences.push_back(text::words(ex.target_text));
  }
  text::WordPiece::Options vo;
  vo.min_word_count = cfg.vocab_min_count;
  GeneratorModel model(text::WordPiece::build(sentences, vo), cfg);

  nn::Rng rng(cfg.seed ^ 0x5851f42d4c957f2dULL);
  const std::size_t steps_per_epoch = (train.size() + cfg.batch_size - 1) / cfg.batch_size;
  nn::AdamConfig ac;
  ac.lr = cfg.lr;
  ac.weight_decay = cfg.weight_decay;
  ac.warmup_steps = cfg.warmup_steps;
  ac.total_steps = steps_per_epoch * cfg.epochs;
  nn::Adam opt(ac);

  std::vector<EpochLoss> history;
  auto record = [&](EpochLoss e) {
    history.push_back(e);
    if (on_epoch) on_epoch(e);
  };
  record({0, model.loss(train), model.loss(dev)});

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  auto params = model.store_.all();
  double best = std::numeric_limits<double>::infinity();
  std::vector<nn::Matrix> best_values;
  model.store_.zero_grad();
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    double sum = 0.0;
    for (std::size_t s = 0; s < order.size(); s += cfg.batch_size) {
      std::vector<const TrainingExample*> batch;
      for (std::size_t k = s; k < std::min(order.size(), s + cfg.batch_size); ++k) batch.push_back(&train[order[k]]);
      nn::Graph g;
      nn::Var l = model.forward_loss(g, batch, &rng);
      sum += g.value(l).data[0] * static_cast<double>(batch.size());
      g.backward(l);
      opt.step(model.store_);
    }
    EpochLoss e{epoch, sum / static_cast<double>(train.size()), dev.empty() ? 0.0 : model.loss(dev)};
    record(e);
    if (dev.empty() || e.dev_loss < best) {
      best = e.dev_loss;
      best_values.clear();
      for (auto* p : params) best_values.push_back(p->value);
    }
  }
  if (!best_values.empty())
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_values[i];
  if (log) *log = std::move(history);
  return model;
}

// ---- inference ----------------------------------------------------------

namespace {

using nn::Matrix;
using nn::Parameter;

Matrix linear_rows(const Matrix& x, const Parameter& w, const Parameter& b) {
  Matrix out(x.rows, w.value.cols);
  for (std::size_t r = 0; r < x.rows; ++r) std::copy(b.value.data.begin(), b.value.data.end(), out.row(r).begin());
  kernels::active().gemm_nn(x.rows, w.value.cols, x.cols, x.data.data(), w.value.data.data(), out.data.data(), true);
  return out;
}

Matrix layer_norm_rows(const Matrix& x, const Parameter& g, const Parameter& b) {
  Matrix out(x.rows, x.cols);
  const std::size_t n = x.cols;
  for (std::size_t r = 0; r < x.rows; ++r) {
    const float* xr = x.row(r).data();
    float mean = 0.0f;
    for (std::size_t j = 0; j < n; ++j) mean += xr[j];
    mean /= static_cast<float>(n);
    float var = 0.0f;
    for (std::size_t j = 0; j < n; ++j) var += (xr[j] - mean) * (xr[j] - mean);
    var /= static_cast<float>(n);
    const float rs = 1.0f / std::sqrt(var + 1e-5f);
    for (std::size_t j = 0; j < n; ++j) out(r, j) = g.value.data[j] * ((xr[j] - mean) * rs) + b.value.data[j];
  }
  return out;
}

void gelu_inplace(Matrix& m) {
  constexpr float k = 0.7978845608028654f;
  for (float& x : m.data) x = 0.5f * x * (1.0f + std::tanh(k * (x + 0.044715f * x * x * x)));
}

// One query row against `len` cached key/value rows of width d.
void attend(const float* q, const float* keys, const float* values, std::size_t len, std::size_t d, std::size_t heads,
            float* out) {
  const std::size_t dh = d / heads;
  const float inv = 1.0f / std::sqrt(static_cast<float>(dh));
  std::vector<float> scores(len);
  std::vector<float> kh(len * dh), vh(len * dh);
  for (std::size_t h = 0; h < heads; ++h) {
    for (std::size_t j = 0; j < len; ++j) {
      std::copy_n(keys + j * d + h * dh, dh, kh.data() + j * dh);
      std::copy_n(values + j * d + h * dh, dh, vh.data() + j * dh);
    }
    kernels::active().gemm_nt(1, len, dh, q + h * dh, kh.data(), scores.data(), false);
    kernels::active().scale(inv, scores.data(), len);
    kernels::softmax(scores);
    kernels::active().gemm_nn(1, dh, len, scores.data(), vh.data(), out + h * dh, false);
  }
}

struct Hypothesis {
  std::vector<std::size_t> tokens;  // generated, without BOS
  double score = 0.0;
  std::vector<std::vector<float>> self_k;  // per layer, [t, d]
  std::vector<std::vector<float>> self_v;
};

class IncrementalDecoder {
 public:
  IncrementalDecoder(const nn::ParameterStore& store, const nn::TransformerConfig& tc, const Matrix& memory)
      : s_(store), tc_(tc), memory_(memory) {
    for (std::size_t l = 0; l < tc_.layers; ++l) {
      const std::string p = "dec.l" + std::to_string(l);
      cross_k_.push_back(linear_rows(memory_, s_.get(p + ".xk.w"), s_.get(p + ".xk.b")));
      cross_v_.push_back(linear_rows(memory_, s_.get(p + ".xv.w"), s_.get(p + ".xv.b")));
    }
  }

  // Advances every hypothesis by its last token (BOS at step 0) and returns
  // next-token log-probabilities, one row per hypothesis.
  Matrix step(std::vector<Hypothesis*>& hyps, std::size_t position) {
    const std::size_t d = tc_.d_model;
    const auto& tok = s_.get("emb.tok").value;
    const auto& pos = s_.get("emb.pos").value;
    const auto& typ = s_.get("emb.type").value;
    if (position >= pos.rows) throw std::length_error("decoder position beyond max_len");
    Matrix x(hyps.size(), d);
    for (std::size_t b = 0; b < hyps.size(); ++b) {
      const std::size_t id = hyps[b]->tokens.empty() ? static_cast<std::size_t>(text::kBos) : hyps[b]->tokens.back();
      for (std::size_t j = 0; j < d; ++j) x(b, j) = tok(id, j) + pos(position, j) + typ(0, j);
      if (hyps[b]->self_k.empty()) {
        hyps[b]->self_k.assign(tc_.layers, {});
        hyps[b]->self_v.assign(tc_.layers, {});
      }
    }
    Matrix att(hyps.size(), d);
    for (std::size_t l = 0; l < tc_.layers; ++l) {
      const std::string p = "dec.l" + std::to_string(l);
      Matrix h = layer_norm_rows(x, s_.get(p + ".ln1.g"), s_.get(p + ".ln1.b"));
      Matrix q = linear_rows(h, s_.get(p + ".q.w"), s_.get(p + ".q.b"));
      Matrix k = linear_rows(h, s_.get(p + ".k.w"), s_.get(p + ".k.b"));
      Matrix v = linear_rows(h, s_.get(p + ".v.w"), s_.get(p + ".v.b"));
      for (std::size_t b = 0; b < hyps.size(); ++b) {
        auto& ck = hyps[b]->self_k[l];
        auto& cv = hyps[b]->self_v[l];
        ck.insert(ck.end(), k.row(b).begin(), k.row(b).end());
        cv.insert(cv.end(), v.row(b).begin(), v.row(b).end());
        attend(q.row(b).data(), ck.data(), cv.data(), ck.size() / d, d, tc_.heads, att.row(b).data());
      }
      Matrix o = linear_rows(att, s_.get(p + ".o.w"), s_.get(p + ".o.b"));
      kernels::active().axpy(1.0f, o.data.data(), x.data.data(), x.size());

      h = layer_norm_rows(x, s_.get(p + ".lnx.g"), s_.get(p + ".lnx.b"));
      q = linear_rows(h, s_.get(p + ".xq.w"), s_.get(p + ".xq.b"));
      for (std::size_t b = 0; b < hyps.size(); ++b)
        attend(q.row(b).data(), cross_k_[l].data.data(), cross_v_[l].data.data(), memory_.rows, d, tc_.heads,
               att.row(b).data());
      o = linear_rows(att, s_.get(p + ".xo.w"), s_.get(p + ".xo.b"));
      kernels::active().axpy(1.0f, o.data.data(), x.data.data(), x.size());

      h = layer_norm_rows(x, s_.get(p + ".ln2.g"), s_.get(p + ".ln2.b"));
      Matrix f = linear_rows(h, s_.get(p + ".ff1.w"), s_.get(p + ".ff1.b"));
      gelu_inplace(f);
      o = linear_rows(f, s_.get(p + ".ff2.w"), s_.get(p + ".ff2.b"));
      kernels::active().axpy(1.0f, o.data.data(), x.data.data(), x.size());
    }
    Matrix hf = layer_norm_rows(x, s_.get("dec.lnf.g"), s_.get("dec.lnf.b"));
    Matrix logits(hyps.size(), tok.rows);
    const auto& ob = s_.get("out.b").value;
    for (std::size_t b = 0; b < hyps.size(); ++b) std::copy(ob.data.begin(), ob.data.end(), logits.row(b).begin());
    kernels::active().gemm_nt(hyps.size(), tok.rows, d, hf.data.data(), tok.data.data(), logits.data.data(), true);
    for (std::size_t b = 0; b < hyps.size(); ++b) {
      auto row = logits.row(b);
      const float m = kernels::max(row);
      double z = 0.0;
      for (float v : row) z += std::exp(static_cast<double>(v - m));
      const float lz = m + static_cast<float>(std::log(z));
      for (float& v : row) v -= lz;
    }
    return logits;
  }

 private:
  const nn::ParameterStore& s_;
  nn::TransformerConfig tc_;
  Matrix memory_;
  std::vector<Matrix> cross_k_, cross_v_;
};

Matrix encode_source(nn::ParameterStore& store, const nn::TransformerConfig& tc, const std::vector<std::size_t>& ids) {
  nn::Packed src;
  src.add(ids, source_types(ids));
  nn::Graph g(false);
  nn::Var mem = nn::encoder(g, store, "enc", tc, nn::embed(g, store, "emb", src), src.self_segments(), nullptr);
  return g.value(mem);
}

bool banned(std::size_t id) {
  return id < static_cast<std::size_t>(text::kNumSpecial) && id != static_cast<std::size_t>(text::kEos);
}

}  // namespace

Matrix GeneratorModel::graph_log_probs(const std::vector<std::size_t>& source,
                                       const std::vector<std::size_t>& prefix) const {
  const auto tc = net_config();
  nn::Packed src, dec;
  src.add(source, source_types(source));
  std::vector<std::size_t> in{static_cast<std::size_t>(text::kBos)};
  in.insert(in.end(), prefix.begin(), prefix.end());
  dec.add(in);
  nn::Graph g(false);
  nn::Var mem = nn::encoder(g, store_, "enc", tc, nn::embed(g, store_, "emb", src), src.self_segments(), nullptr);
  nn::Var h = nn::decoder(g, store_, "dec", tc, nn::embed(g, store_, "emb", dec), dec.self_segments(), mem,
                          nn::cross_segments(dec, src), nullptr);
  nn::Var logits = g.add_row(g.matmul_nt(h, g.param(store_.get("emb.tok"))), g.param(store_.get("out.b")));
  Matrix out = g.value(logits);
  for (std::size_t r = 0; r < out.rows; ++r) {
    auto row = out.row(r);
    const float m = kernels::max(row);
    double z = 0.0;
    for (float v : row) z += std::exp(static_cast<double>(v - m));
    const float lz = m + static_cast<float>(std::log(z));
    for (float& v : row) v -= lz;
  }
  return out;
}

Matrix GeneratorModel::incremental_log_probs(const std::vector<std::size_t>& source,
                                             const std::vector<std::size_t>& prefix) const {
  const auto tc = net_config();
  IncrementalDecoder dec(store_, tc, encode_source(store_, tc, source));
  Hypothesis hyp;
  std::vector<Hypothesis*> hs{&hyp};
  Matrix out(prefix.size() + 1, vocab_.size());
  for (std::size_t t = 0; t <= prefix.size(); ++t) {
    Matrix lp = dec.step(hs, t);
    std::copy(lp.row(0).begin(), lp.row(0).end(), out.row(t).begin());
    if (t < prefix.size()) hyp.tokens.push_back(prefix[t]);
  }
  return out;
}

std::vector<std::size_t> GeneratorModel::beam_search(const std::vector<std::size_t>& source, std::size_t beams,
                                                     std::size_t max_length, float length_penalty) const {
  if (beams == 0) throw std::invalid_argument("beam count must be at least 1");
  const auto tc = net_config();
  max_length = std::min(max_length, cfg_.max_target_len);
  IncrementalDecoder dec(store_, tc, encode_source(store_, tc, source));
  const std::size_t eos = static_cast<std::size_t>(text::kEos);
  auto normalized = [&](double score, std::size_t len) {
    return score / std::pow(static_cast<double>(std::max<std::size_t>(len, 1)), length_penalty);
  };

  std::vector<Hypothesis> live(1);
  std::vector<std::pair<double, std::vector<std::size_t>>> finished;
  for (std::size_t t = 0; t < max_length && !live.empty(); ++t) {
    std::vector<Hypothesis*> ptrs;
    for (auto& h : live) ptrs.push_back(&h);
    Matrix lp = dec.step(ptrs, t);

    struct Cand {
      double score;
      std::size_t parent;
      std::size_t token;
    };
    std::vector<Cand> cands;
    for (std::size_t b = 0; b < live.size(); ++b) {
      const auto row = lp.row(b);
      // Top 2*beams tokens of this hypothesis are enough for the global top 2*beams.
      std::vector<std::size_t> idx;
      for (std::size_t v = 0; v < row.size(); ++v)
        if (!banned(v) && row[v] != kNegInf) idx.push_back(v);
      const std::size_t k = std::min(idx.size(), 2 * beams);
      std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                        [&](std::size_t a, std::size_t c) { return row[a] > row[c] || (row[a] == row[c] && a < c); });
      for (std::size_t i = 0; i < k; ++i) cands.push_back({live[b].score + row[idx[i]], b, idx[i]});
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& c) { return a.score > c.score; });

    std::vector<Hypothesis> next;
    for (const auto& c : cands) {
      if (next.size() == beams) break;
      if (c.token == eos || t + 1 == max_length) {
        auto toks = live[c.parent].tokens;
        if (c.token != eos) toks.push_back(c.token);
        finished.emplace_back(normalized(c.score, toks.size() + 1), std::move(toks));
        if (c.token == eos) continue;
        continue;
      }
      Hypothesis h = live[c.parent];
      h.tokens.push_back(c.token);
      h.score = c.score;
      next.push_back(std::move(h));
    }
    live = std::move(next);

    if (finished.size() >= beams && !live.empty()) {
      std::vector<double> fs;
      for (const auto& f : finished) fs.push_back(f.first);
      std::sort(fs.rbegin(), fs.rend());
      const double worst_kept = fs[beams - 1];
      double best_live = -std::numeric_limits<double>::infinity();
      for (const auto& h : live) best_live = std::max(best_live, normalized(h.score, h.tokens.size() + 1));
      if (best_live < worst_kept) break;
    }
  }
  if (finished.empty()) return {};
  std::size_t best = 0;
  for (std::size_t i = 1; i < finished.size(); ++i)
    if (finished[i].first > finished[best].first) best = i;
  return finished[best].second;
}

std::string GeneratorModel::fill_input(std::string_view input_text, const GenerationConfig& gen) const {
  const auto src = source_ids(input_text);
  auto render = [&](const std::vector<std::size_t>& ids) {
    std::vector<text::TokenId> t(ids.begin(), ids.end());
    return text::detokenize(vocab_.decode_words(t));
  };
  std::string out = render(beam_search(src, gen.beams, gen.max_length, gen.length_penalty));
  if (!text::trim(out).empty()) return out;
  out = render(beam_search(src, 1, gen.max_length, gen.length_penalty));
  if (!text::trim(out).empty()) return out;
  throw GenerationError("decoding produced an empty response (beam and greedy)");
}

std::string GeneratorModel::fill(std::string_view prompt, const templating::Template& tmpl,
                                 const GenerationConfig& gen) const {
  return fill_input(make_input(prompt, templating::render_template(tmpl)), gen);
}

void GeneratorModel::save(const std::filesystem::path& dir, const nlohmann::json& metrics) const {
  nn::Manifest m;
  m.architecture = kArchitecture;
  m.config = nlohmann::json(cfg_);
  m.metrics = metrics;
  nn::write_manifest(dir, m);
  vocab_.save(dir / "vocab.txt");
  store_.save(dir / "weights.bin");
}

GeneratorModel GeneratorModel::load(const std::filesystem::path& dir) {
  const auto m = nn::read_manifest(dir, kArchitecture);
  GeneratorModel model(text::WordPiece::load(dir / "vocab.txt"), m.config.get<GeneratorConfig>());
  model.store_.load(dir / "weights.bin");
  return model;
}

}  // namespace verve::generator
