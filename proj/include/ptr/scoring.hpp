// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

// Joint class scores from per-mask distributions: p(y|x) = prod_j p(mask_j = phi_j(y)).

#pragma once

#include <string>
#include <vector>

#include "ptr/instance.hpp"
#include "ptr/mlm/model.hpp"
#include "ptr/prompt.hpp"

namespace ptr::scoring {

struct MaskDistributions {
  std::vector<std::vector<double>> per_position;  // vector j has |V_j| entries
};

struct ClassScores {
  std::vector<double> scores;  // schema class order, not renormalized
  std::size_t predicted = 0;   // argmax, first class wins ties

  /// scores / sum(scores); reporting only.
  std::vector<double> normalized() const;
};

/// Classes whose rule is reversed read their phrases from `reversed`, the
/// distributions of the reversed rendering; it must be given when the schema
/// has such classes. Throws ShapeError on dimension mismatch.
ClassScores joint_class_distribution(const MaskDistributions& dists, const prompt::PromptSchema& schema,
                                     const MaskDistributions* reversed = nullptr);

/// -(1/|B|) sum_x sum_j log dists_x[j][phi_j(y_x)], each probability clamped
/// at 1e-12. dists_batch[i] must come from the rendering of gold[i]'s
/// orientation. Throws ShapeError on an empty batch or mismatch, DataError on
/// an unknown gold label.
double nll_loss(const std::vector<MaskDistributions>& dists_batch, const std::vector<std::string>& gold,
                const prompt::PromptSchema& schema);

/// Model distributions at each mask of render(schema, instance, orientation).
MaskDistributions mask_distributions(const mlm::TinyMLM& model, const prompt::PromptSchema& schema,
                                     const Instance& instance,
                                     prompt::Orientation orientation = prompt::Orientation::kForward);

/// Full scoring, rendering the reversed view only when the schema needs it.
ClassScores score(const mlm::TinyMLM& model, const prompt::PromptSchema& schema, const Instance& instance);

std::string predict(const mlm::TinyMLM& model, const prompt::PromptSchema& schema, const Instance& instance);

/// [CLS]-head baseline prediction over model.class_labels().
std::string predict_baseline(const mlm::TinyMLM& model, const Instance& instance);

}  // namespace ptr::scoring
