// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

// Desk-scale masked language model: token + position embeddings, a pre-LN
// transformer encoder, tied-embedding mask heads and a [CLS] classifier head,
// with hand-written reverse-mode gradients.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ptr/mlm/matrix.hpp"
#include "ptr/mlm/vocab.hpp"
#include "ptr/prompt.hpp"

namespace ptr::mlm {

enum class Objective { kPtr, kClsBaseline };

std::string_view objective_name(Objective objective);  // "ptr", "cls-baseline"
Objective parse_objective(std::string_view name);      // throws UsageError

struct ModelConfig {
  int d_model = 64;
  int n_layers = 2;
  int n_heads = 4;
  int d_ff = 256;
  int max_len = 64;  // including [CLS] and [SEP]
  double init_std = 0.02;
  double layer_norm_eps = 1e-5;
  bool map_unknown = false;  // unknown words become [UNK] instead of an error

  void check() const;  // throws UsageError on inconsistent sizes
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct BlockParams {
  Matrix ln1_gain, ln1_bias;  // 1 x d
  Matrix wq, bq, wk, bk, wv, bv, wo, bo;  // d x d weights, 1 x d biases
  Matrix ln2_gain, ln2_bias;
  Matrix w1, b1;  // d_ff x d, 1 x d_ff
  Matrix w2, b2;  // d x d_ff, 1 x d
};

/// Every trainable tensor. Learnable prompt tokens are the token-embedding
/// rows of ids [L0].. (see Vocab), so they share the embedding table.
struct Parameters {
  Matrix token_embedding;     // |V| x d
  Matrix position_embedding;  // max_len x d
  std::vector<BlockParams> blocks;
  Matrix final_gain, final_bias;  // 1 x d
  Matrix cls_weight;              // |Y| x d
  Matrix cls_bias;                // 1 x |Y|

  /// Zero tensors shaped for the configuration.
  static Parameters zeros(const ModelConfig& config, std::size_t vocab_size, std::size_t n_classes);

  /// Visits every tensor in a fixed order with a stable dotted name.
  template <typename F>
  void visit(F&& f) {
    visit_impl(*this, f);
  }
  template <typename F>
  void visit(F&& f) const {
    visit_impl(*this, f);
  }

  std::size_t count() const;
  void fill(double value);
  bool all_finite() const;

 private:
  template <typename Self, typename F>
  static void visit_impl(Self& p, F& f) {
    f("token_embedding", p.token_embedding);
    f("position_embedding", p.position_embedding);
    for (std::size_t i = 0; i < p.blocks.size(); ++i) {
      auto& b = p.blocks[i];
      const std::string pre = "blocks." + std::to_string(i) + ".";
      f(pre + "ln1_gain", b.ln1_gain);
      f(pre + "ln1_bias", b.ln1_bias);
      f(pre + "wq", b.wq);
      f(pre + "bq", b.bq);
      f(pre + "wk", b.wk);
      f(pre + "bk", b.bk);
      f(pre + "wv", b.wv);
      f(pre + "bv", b.bv);
      f(pre + "wo", b.wo);
      f(pre + "bo", b.bo);
      f(pre + "ln2_gain", b.ln2_gain);
      f(pre + "ln2_bias", b.ln2_bias);
      f(pre + "w1", b.w1);
      f(pre + "b1", b.b1);
      f(pre + "w2", b.w2);
      f(pre + "b2", b.b2);
    }
    f("final_gain", p.final_gain);
    f("final_bias", p.final_bias);
    f("cls_weight", p.cls_weight);
    f("cls_bias", p.cls_bias);
  }
};

/// Closed form: V*d + max_len*d + L*(4d^2 + 2d*d_ff + 9d + d_ff) + 2d + |Y|*d + |Y|.
std::size_t expected_parameter_count(const ModelConfig& config, std::size_t vocab_size,
                                     std::size_t n_classes);

/// One training or scoring unit, already mapped to ids. Positions index the
/// framed sequence ([CLS] at 0).
struct Example {
  std::string id;
  std::vector<TokenId> ids;
  std::vector<std::size_t> mask_positions;
  std::vector<std::vector<TokenId>> candidates;  // per mask: label ids of V_j
  std::vector<std::size_t> targets;              // per mask gold index, or {class} for the baseline
};

class TinyMLM {
 public:
  /// All weights zero, layer-norm gains one.
  TinyMLM(ModelConfig config, Vocab vocab, std::vector<std::string> class_labels);

  /// Gaussian N(0, init_std) for embeddings and weight matrices, drawn in
  /// visit order from Rng(seed); biases zero, gains one.
  void initialize(std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  const Vocab& vocab() const { return vocab_; }
  const std::vector<std::string>& class_labels() const { return class_labels_; }
  Parameters& params() { return params_; }
  const Parameters& params() const { return params_; }

  /// Frames with [CLS] ... [SEP] and maps to ids. Throws DataError on unknown
  /// words (unless map_unknown) or when the framed length exceeds max_len.
  std::vector<TokenId> token_ids(const prompt::RenderedInput& input) const;

  /// Final-layer hidden vectors, one row per framed position.
  Matrix encode(const prompt::RenderedInput& input) const;
  Matrix encode_ids(const std::vector<TokenId>& ids) const;

  /// softmax_k(E[subset_k] . h). Throws ShapeError on an empty subset.
  std::vector<double> mask_distribution(std::span<const double> hidden,
                                        const std::vector<TokenId>& subset) const;

  /// softmax(W h + b) over the classes.
  std::vector<double> cls_head(std::span<const double> hidden_cls) const;

  /// Maps a rendered prompt to an example; targets follow the class's
  /// verbalizer tuple when gold_class is given.
  Example make_ptr_example(const prompt::PromptSchema& schema, const prompt::RenderedInput& input,
                           const std::string& id, std::optional<std::size_t> gold_class) const;
  Example make_cls_example(const prompt::RenderedInput& input, const std::string& id,
                           std::optional<std::size_t> gold_class) const;

  /// Mean loss over the batch; adds d(loss)/d(params) into grad when given.
  /// PTR: -sum_j log p(mask_j = target_j), probabilities clamped at 1e-12.
  /// Baseline: -log p(target class). Throws NumericError naming the first
  /// instance whose loss is not finite.
  double loss_and_gradient(const std::vector<Example>& batch, Objective objective,
                           Parameters* grad) const;

  /// Binary checkpoint; see docs/file_formats.md. The schema, when given, is
  /// stored so evaluation needs no separate spec.
  void save(const std::filesystem::path& path, Objective objective,
            const prompt::PromptSchema* schema = nullptr) const;
  struct Loaded;
  static Loaded load(const std::filesystem::path& path);

  friend bool operator==(const TinyMLM& a, const TinyMLM& b);

 private:
  ModelConfig config_;
  Vocab vocab_;
  std::vector<std::string> class_labels_;
  Parameters params_;
};

struct TinyMLM::Loaded {
  TinyMLM model;
  Objective objective;
  std::optional<prompt::PromptSchema> schema;
};

bool operator==(const Parameters& a, const Parameters& b);

/// Vocabulary for a schema and corpus: learnable tokens, every V_j phrase,
/// template literals and every instance token.
Vocab build_vocab(const prompt::PromptSchema& schema, const std::vector<Instance>& instances);

}  // namespace ptr::mlm
