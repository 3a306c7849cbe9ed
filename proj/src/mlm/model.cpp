// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptr/mlm/model.hpp"

#include <cmath>

#include "ptr/error.hpp"
#include "ptr/kernels.hpp"
#include "ptr/mlm/layers.hpp"
#include "ptr/rng.hpp"

namespace ptr::mlm {

namespace {

constexpr double kProbFloor = 1e-12;

struct BlockTrace {
  Matrix x_in;
  layers::LayerNormCache ln1;
  Matrix a, q, k, v;
  std::vector<Matrix> probs;
  Matrix ctx, x_mid;
  layers::LayerNormCache ln2;
  Matrix b, h1, g;
};

struct Trace {
  std::vector<BlockTrace> blocks;
  Matrix x_final;
  layers::LayerNormCache final_ln;
};

Matrix forward(const ModelConfig& cfg, const Parameters& p, const std::vector<TokenId>& ids,
               Trace* trace) {
  const std::size_t n = ids.size();
  const std::size_t d = static_cast<std::size_t>(cfg.d_model);
  if (n > static_cast<std::size_t>(cfg.max_len)) {
    throw DataError("sequence of " + std::to_string(n) + " tokens exceeds max_len " +
                    std::to_string(cfg.max_len));
  }
  Matrix x(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = static_cast<std::size_t>(ids[i]);
    if (id >= p.token_embedding.rows()) throw ShapeError("token id outside the embedding table");
    for (std::size_t c = 0; c < d; ++c) {
      x(i, c) = p.token_embedding(id, c) + p.position_embedding(i, c);
    }
  }
  Trace local;
  Trace& t = trace ? *trace : local;
  t.blocks.resize(p.blocks.size());
  for (std::size_t l = 0; l < p.blocks.size(); ++l) {
    const BlockParams& bp = p.blocks[l];
    BlockTrace& bt = t.blocks[l];
    bt.x_in = std::move(x);
    layers::layer_norm_forward(bt.x_in, bp.ln1_gain, bp.ln1_bias, cfg.layer_norm_eps, bt.a, bt.ln1);
    layers::linear_forward(bt.a, bp.wq, bp.bq, bt.q);
    layers::linear_forward(bt.a, bp.wk, bp.bk, bt.k);
    layers::linear_forward(bt.a, bp.wv, bp.bv, bt.v);
    layers::attention_forward(bt.q, bt.k, bt.v, cfg.n_heads, bt.ctx, bt.probs);
    Matrix attn;
    layers::linear_forward(bt.ctx, bp.wo, bp.bo, attn);
    bt.x_mid = bt.x_in;
    for (std::size_t i = 0; i < attn.size(); ++i) bt.x_mid.data()[i] += attn.data()[i];
    layers::layer_norm_forward(bt.x_mid, bp.ln2_gain, bp.ln2_bias, cfg.layer_norm_eps, bt.b, bt.ln2);
    layers::linear_forward(bt.b, bp.w1, bp.b1, bt.h1);
    layers::gelu_forward(bt.h1, bt.g);
    Matrix ff;
    layers::linear_forward(bt.g, bp.w2, bp.b2, ff);
    x = bt.x_mid;
    for (std::size_t i = 0; i < ff.size(); ++i) x.data()[i] += ff.data()[i];
  }
  t.x_final = std::move(x);
  Matrix out;
  layers::layer_norm_forward(t.x_final, p.final_gain, p.final_bias, cfg.layer_norm_eps, out,
                             t.final_ln);
  return out;
}

void backward(const Parameters& p, const std::vector<TokenId>& ids, const Trace& t,
              const Matrix& dout, Parameters& g) {
  Matrix dx;
  layers::layer_norm_backward(dout, p.final_gain, t.final_ln, dx, g.final_gain, g.final_bias);
  for (std::size_t l = p.blocks.size(); l-- > 0;) {
    const BlockParams& bp = p.blocks[l];
    BlockParams& gb = g.blocks[l];
    const BlockTrace& bt = t.blocks[l];

    Matrix dg, dh1, db, dmid;
    layers::linear_backward(bt.g, bp.w2, dx, dg, gb.w2, gb.b2);
    layers::gelu_backward(bt.h1, dg, dh1);
    layers::linear_backward(bt.b, bp.w1, dh1, db, gb.w1, gb.b1);
    layers::layer_norm_backward(db, bp.ln2_gain, bt.ln2, dmid, gb.ln2_gain, gb.ln2_bias);
    for (std::size_t i = 0; i < dmid.size(); ++i) dmid.data()[i] += dx.data()[i];

    Matrix dctx, dq, dk, dv, da, da_part;
    layers::linear_backward(bt.ctx, bp.wo, dmid, dctx, gb.wo, gb.bo);
    layers::attention_backward(bt.q, bt.k, bt.v, static_cast<int>(bt.probs.size()), bt.probs, dctx,
                               dq, dk, dv);
    layers::linear_backward(bt.a, bp.wq, dq, da, gb.wq, gb.bq);
    layers::linear_backward(bt.a, bp.wk, dk, da_part, gb.wk, gb.bk);
    for (std::size_t i = 0; i < da.size(); ++i) da.data()[i] += da_part.data()[i];
    layers::linear_backward(bt.a, bp.wv, dv, da_part, gb.wv, gb.bv);
    for (std::size_t i = 0; i < da.size(); ++i) da.data()[i] += da_part.data()[i];
    Matrix din;
    layers::layer_norm_backward(da, bp.ln1_gain, bt.ln1, din, gb.ln1_gain, gb.ln1_bias);
    for (std::size_t i = 0; i < din.size(); ++i) din.data()[i] += dmid.data()[i];
    dx = std::move(din);
  }
  const auto& k = kernels::active();
  const std::size_t d = dx.cols();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    k.axpy(1.0, dx.row(i).data(), g.token_embedding.row(static_cast<std::size_t>(ids[i])).data(), d);
    k.axpy(1.0, dx.row(i).data(), g.position_embedding.row(i).data(), d);
  }
}

bool is_gain(const std::string& name) { return name.ends_with("gain"); }

bool is_bias(const std::string& name) {
  const auto leaf = name.substr(name.rfind('.') == std::string::npos ? 0 : name.rfind('.') + 1);
  return leaf.ends_with("bias") || (leaf.size() == 2 && leaf[0] == 'b');
}

}  // namespace

std::string_view objective_name(Objective objective) {
  return objective == Objective::kPtr ? "ptr" : "cls-baseline";
}

Objective parse_objective(std::string_view name) {
  if (name == "ptr") return Objective::kPtr;
  if (name == "cls-baseline" || name == "cls") return Objective::kClsBaseline;
  throw UsageError("unknown objective '" + std::string(name) + "' (expected ptr or cls-baseline)");
}

void ModelConfig::check() const {
  if (d_model <= 0 || n_layers < 0 || n_heads <= 0 || d_ff <= 0 || max_len < 3) {
    throw UsageError("model config: sizes must be positive and max_len at least 3");
  }
  if (d_model % n_heads != 0) throw UsageError("model config: d_model must be divisible by n_heads");
  if (!(init_std >= 0.0) || !(layer_norm_eps > 0.0)) {
    throw UsageError("model config: init_std must be >= 0 and layer_norm_eps > 0");
  }
}

Parameters Parameters::zeros(const ModelConfig& cfg, std::size_t vocab_size, std::size_t n_classes) {
  const auto d = static_cast<std::size_t>(cfg.d_model);
  const auto f = static_cast<std::size_t>(cfg.d_ff);
  Parameters p;
  p.token_embedding = Matrix(vocab_size, d);
  p.position_embedding = Matrix(static_cast<std::size_t>(cfg.max_len), d);
  p.blocks.resize(static_cast<std::size_t>(cfg.n_layers));
  for (auto& b : p.blocks) {
    b.ln1_gain = Matrix(1, d);
    b.ln1_bias = Matrix(1, d);
    b.wq = Matrix(d, d);
    b.bq = Matrix(1, d);
    b.wk = Matrix(d, d);
    b.bk = Matrix(1, d);
    b.wv = Matrix(d, d);
    b.bv = Matrix(1, d);
    b.wo = Matrix(d, d);
    b.bo = Matrix(1, d);
    b.ln2_gain = Matrix(1, d);
    b.ln2_bias = Matrix(1, d);
    b.w1 = Matrix(f, d);
    b.b1 = Matrix(1, f);
    b.w2 = Matrix(d, f);
    b.b2 = Matrix(1, d);
  }
  p.final_gain = Matrix(1, d);
  p.final_bias = Matrix(1, d);
  p.cls_weight = Matrix(n_classes, d);
  p.cls_bias = Matrix(1, n_classes);
  return p;
}

std::size_t Parameters::count() const {
  std::size_t total = 0;
  visit([&](const std::string&, const Matrix& m) { total += m.size(); });
  return total;
}

void Parameters::fill(double value) {
  visit([&](const std::string&, Matrix& m) { m.fill(value); });
}

bool Parameters::all_finite() const {
  bool ok = true;
  visit([&](const std::string&, const Matrix& m) {
    for (double v : m.values()) ok = ok && std::isfinite(v);
  });
  return ok;
}

bool operator==(const Parameters& a, const Parameters& b) {
  std::vector<const Matrix*> lhs, rhs;
  a.visit([&](const std::string&, const Matrix& m) { lhs.push_back(&m); });
  b.visit([&](const std::string&, const Matrix& m) { rhs.push_back(&m); });
  if (lhs.size() != rhs.size()) return false;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (!(*lhs[i] == *rhs[i])) return false;
  }
  return true;
}

std::size_t expected_parameter_count(const ModelConfig& cfg, std::size_t vocab_size,
                                     std::size_t n_classes) {
  const auto d = static_cast<std::size_t>(cfg.d_model);
  const auto f = static_cast<std::size_t>(cfg.d_ff);
  const auto layers = static_cast<std::size_t>(cfg.n_layers);
  const std::size_t block = 4 * d * d + 2 * d * f + 9 * d + f;
  return vocab_size * d + static_cast<std::size_t>(cfg.max_len) * d + layers * block + 2 * d +
         n_classes * d + n_classes;
}

TinyMLM::TinyMLM(ModelConfig config, Vocab vocab, std::vector<std::string> class_labels)
    : config_(config), vocab_(std::move(vocab)), class_labels_(std::move(class_labels)) {
  config_.check();
  params_ = Parameters::zeros(config_, vocab_.size(), class_labels_.size());
  params_.visit([](const std::string& name, Matrix& m) {
    if (is_gain(name)) m.fill(1.0);
  });
}

void TinyMLM::initialize(std::uint64_t seed) {
  Rng rng(seed);
  const double std = config_.init_std;
  params_.visit([&](const std::string& name, Matrix& m) {
    if (is_gain(name)) {
      m.fill(1.0);
    } else if (is_bias(name)) {
      m.fill(0.0);
    } else {
      for (double& v : m.values()) v = std * rng.normal();
    }
  });
}

std::vector<TokenId> TinyMLM::token_ids(const prompt::RenderedInput& input) const {
  const std::size_t framed = input.tokens.size() + 2;
  if (framed > static_cast<std::size_t>(config_.max_len)) {
    throw DataError("input of " + std::to_string(framed) + " tokens (with [CLS]/[SEP]) exceeds max_len " +
                    std::to_string(config_.max_len));
  }
  std::vector<TokenId> ids;
  ids.reserve(framed);
  ids.push_back(kClsId);
  for (const auto& tok : input.tokens) ids.push_back(vocab_.token_id(tok, config_.map_unknown));
  ids.push_back(kSepId);
  return ids;
}

Matrix TinyMLM::encode(const prompt::RenderedInput& input) const { return encode_ids(token_ids(input)); }

Matrix TinyMLM::encode_ids(const std::vector<TokenId>& ids) const {
  return forward(config_, params_, ids, nullptr);
}

std::vector<double> TinyMLM::mask_distribution(std::span<const double> hidden,
                                               const std::vector<TokenId>& subset) const {
  if (subset.empty()) throw ShapeError("mask_distribution: empty vocabulary subset");
  if (hidden.size() != static_cast<std::size_t>(config_.d_model)) {
    throw ShapeError("mask_distribution: hidden vector has wrong width");
  }
  const auto& k = kernels::active();
  std::vector<double> logits(subset.size());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    const auto id = static_cast<std::size_t>(subset[i]);
    if (id >= vocab_.size()) throw ShapeError("mask_distribution: token id outside the vocabulary");
    logits[i] = k.dot(params_.token_embedding.row(id).data(), hidden.data(), hidden.size());
  }
  return layers::softmax(logits);
}

std::vector<double> TinyMLM::cls_head(std::span<const double> hidden_cls) const {
  if (hidden_cls.size() != static_cast<std::size_t>(config_.d_model)) {
    throw ShapeError("cls_head: hidden vector has wrong width");
  }
  std::vector<double> logits(class_labels_.size());
  kernels::active().affine(params_.cls_weight.data(), params_.cls_bias.data(), hidden_cls.data(),
                           logits.data(), logits.size(), hidden_cls.size());
  return layers::softmax(logits);
}

Example TinyMLM::make_ptr_example(const prompt::PromptSchema& schema,
                                  const prompt::RenderedInput& input, const std::string& id,
                                  std::optional<std::size_t> gold_class) const {
  if (input.mask_positions.size() != schema.n_masks()) {
    throw ShapeError("rendered input has " + std::to_string(input.mask_positions.size()) +
                     " masks, schema expects " + std::to_string(schema.n_masks()));
  }
  Example ex;
  ex.id = id;
  ex.ids = token_ids(input);
  for (std::size_t pos : input.mask_positions) ex.mask_positions.push_back(pos + 1);
  for (const auto& vj : schema.mask_vocabs) {
    std::vector<TokenId> ids;
    for (const auto& phrase : vj) ids.push_back(vocab_.label_id(phrase));
    ex.candidates.push_back(std::move(ids));
  }
  if (gold_class) ex.targets = schema.classes.at(*gold_class).indices;
  return ex;
}

Example TinyMLM::make_cls_example(const prompt::RenderedInput& input, const std::string& id,
                                  std::optional<std::size_t> gold_class) const {
  Example ex;
  ex.id = id;
  ex.ids = token_ids(input);
  if (gold_class) {
    if (*gold_class >= class_labels_.size()) throw ShapeError("gold class outside the [CLS] head");
    ex.targets = {*gold_class};
  }
  return ex;
}

double TinyMLM::loss_and_gradient(const std::vector<Example>& batch, Objective objective,
                                  Parameters* grad) const {
  if (batch.empty()) throw ShapeError("loss_and_gradient: empty batch");
  const auto& k = kernels::active();
  const std::size_t d = static_cast<std::size_t>(config_.d_model);
  const double inv_b = 1.0 / static_cast<double>(batch.size());
  double total = 0.0;
  Trace trace;
  for (const Example& ex : batch) {
    const Matrix out = forward(config_, params_, ex.ids, grad ? &trace : nullptr);
    Matrix dout(out.rows(), out.cols());
    double loss = 0.0;
    if (objective == Objective::kPtr) {
      if (ex.targets.size() != ex.mask_positions.size() || ex.candidates.size() != ex.targets.size()) {
        throw ShapeError("example '" + ex.id + "' lacks per-mask targets");
      }
      for (std::size_t j = 0; j < ex.targets.size(); ++j) {
        const auto h = out.row(ex.mask_positions[j]);
        const auto p = mask_distribution(h, ex.candidates[j]);
        const std::size_t t = ex.targets[j];
        loss -= std::log(std::max(p.at(t), kProbFloor));
        if (!grad || p[t] < kProbFloor) continue;
        auto dh = dout.row(ex.mask_positions[j]);
        for (std::size_t c = 0; c < p.size(); ++c) {
          const double dl = (p[c] - (c == t ? 1.0 : 0.0)) * inv_b;
          const auto row = static_cast<std::size_t>(ex.candidates[j][c]);
          k.axpy(dl, params_.token_embedding.row(row).data(), dh.data(), d);
          k.axpy(dl, h.data(), grad->token_embedding.row(row).data(), d);
        }
      }
    } else {
      if (ex.targets.size() != 1) throw ShapeError("example '" + ex.id + "' lacks a class target");
      const auto h = out.row(0);
      const auto p = cls_head(h);
      const std::size_t t = ex.targets[0];
      loss = -std::log(std::max(p.at(t), kProbFloor));
      if (grad && p[t] >= kProbFloor) {
        auto dh = dout.row(0);
        for (std::size_t c = 0; c < p.size(); ++c) {
          const double dl = (p[c] - (c == t ? 1.0 : 0.0)) * inv_b;
          k.axpy(dl, params_.cls_weight.row(c).data(), dh.data(), d);
          k.axpy(dl, h.data(), grad->cls_weight.row(c).data(), d);
          grad->cls_bias(0, c) += dl;
        }
      }
    }
    if (!std::isfinite(loss)) {
      throw NumericError("non-finite loss for instance '" + ex.id + "'");
    }
    total += loss;
    if (grad) backward(params_, ex.ids, trace, dout, *grad);
  }
  return total * inv_b;
}

bool operator==(const TinyMLM& a, const TinyMLM& b) {
  return a.config_ == b.config_ && a.vocab_ == b.vocab_ && a.class_labels_ == b.class_labels_ &&
         a.params_ == b.params_;
}

Vocab build_vocab(const prompt::PromptSchema& schema, const std::vector<Instance>& instances) {
  std::vector<std::string> phrases;
  for (const auto& vj : schema.mask_vocabs) phrases.insert(phrases.end(), vj.begin(), vj.end());
  std::vector<std::string> words;
  for (const auto& e : schema.elements) {
    if (e.kind == dsl::TemplateElement::Kind::kLiteral) words.push_back(e.word);
  }
  for (const auto& inst : instances) words.insert(words.end(), inst.tokens.begin(), inst.tokens.end());
  return Vocab::build(schema.learnable_count, phrases, std::move(words));
}

}  // namespace ptr::mlm
