// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptr/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "ptr/error.hpp"

namespace ptr::scoring {

namespace {

constexpr double kProbFloor = 1e-12;

void check_shape(const MaskDistributions& dists, const prompt::PromptSchema& schema) {
  if (dists.per_position.size() != schema.n_masks()) {
    throw ShapeError("expected " + std::to_string(schema.n_masks()) + " mask distributions, got " +
                     std::to_string(dists.per_position.size()));
  }
  for (std::size_t j = 0; j < schema.n_masks(); ++j) {
    if (dists.per_position[j].size() != schema.mask_vocabs[j].size()) {
      throw ShapeError("mask " + std::to_string(j + 1) + ": distribution has " +
                       std::to_string(dists.per_position[j].size()) + " entries, V_" +
                       std::to_string(j + 1) + " has " + std::to_string(schema.mask_vocabs[j].size()));
    }
  }
}

}  // namespace

std::vector<double> ClassScores::normalized() const {
  double total = 0.0;
  for (double s : scores) total += s;
  std::vector<double> out(scores.size(), 0.0);
  if (total > 0.0) {
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] / total;
  }
  return out;
}

ClassScores joint_class_distribution(const MaskDistributions& dists, const prompt::PromptSchema& schema,
                                     const MaskDistributions* reversed) {
  check_shape(dists, schema);
  if (reversed) check_shape(*reversed, schema);
  ClassScores out;
  out.scores.reserve(schema.classes.size());
  for (const auto& cls : schema.classes) {
    if (cls.reversed && !reversed) {
      throw ShapeError("class '" + cls.label + "' is reversed but no reversed distributions were given");
    }
    const MaskDistributions& src = cls.reversed ? *reversed : dists;
    double p = 1.0;
    for (std::size_t j = 0; j < cls.indices.size(); ++j) p *= src.per_position[j][cls.indices[j]];
    out.scores.push_back(p);
  }
  for (std::size_t c = 1; c < out.scores.size(); ++c) {
    if (out.scores[c] > out.scores[out.predicted]) out.predicted = c;
  }
  return out;
}

double nll_loss(const std::vector<MaskDistributions>& dists_batch, const std::vector<std::string>& gold,
                const prompt::PromptSchema& schema) {
  if (dists_batch.empty()) throw ShapeError("nll_loss: empty batch");
  if (dists_batch.size() != gold.size()) throw ShapeError("nll_loss: batch and gold sizes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < dists_batch.size(); ++i) {
    check_shape(dists_batch[i], schema);
    const auto c = schema.class_index(gold[i]);
    if (!c) throw DataError("nll_loss: unknown gold class '" + gold[i] + "'");
    const auto& idx = schema.classes[*c].indices;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      total -= std::log(std::max(dists_batch[i].per_position[j][idx[j]], kProbFloor));
    }
  }
  return total / static_cast<double>(dists_batch.size());
}

MaskDistributions mask_distributions(const mlm::TinyMLM& model, const prompt::PromptSchema& schema,
                                     const Instance& instance, prompt::Orientation orientation) {
  const auto rendered = prompt::render(schema, instance, orientation);
  const auto ex = model.make_ptr_example(schema, rendered, instance.id, std::nullopt);
  const mlm::Matrix hidden = model.encode_ids(ex.ids);
  MaskDistributions out;
  for (std::size_t j = 0; j < ex.mask_positions.size(); ++j) {
    out.per_position.push_back(model.mask_distribution(hidden.row(ex.mask_positions[j]), ex.candidates[j]));
  }
  return out;
}

ClassScores score(const mlm::TinyMLM& model, const prompt::PromptSchema& schema, const Instance& instance) {
  const bool need_reversed = schema.uses(prompt::Orientation::kReversed);
  const bool need_forward = schema.uses(prompt::Orientation::kForward);
  MaskDistributions fwd, rev;
  if (need_forward) fwd = mask_distributions(model, schema, instance, prompt::Orientation::kForward);
  if (need_reversed) rev = mask_distributions(model, schema, instance, prompt::Orientation::kReversed);
  if (!need_forward) fwd = rev;
  return joint_class_distribution(fwd, schema, need_reversed ? &rev : nullptr);
}

std::string predict(const mlm::TinyMLM& model, const prompt::PromptSchema& schema, const Instance& instance) {
  return schema.classes[score(model, schema, instance).predicted].label;
}

std::string predict_baseline(const mlm::TinyMLM& model, const Instance& instance) {
  const auto ids = model.token_ids(prompt::render_plain(instance));
  const auto p = model.cls_head(model.encode_ids(ids).row(0));
  const auto best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
  return model.class_labels().at(best);
}

}  // namespace ptr::scoring
