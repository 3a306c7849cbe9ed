// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

// Optimization loop (Adam, linear warmup then linear decay, decoupled weight
// decay), dev-based checkpoint selection and the few-shot sampler.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ptr/corpus.hpp"
#include "ptr/mlm/model.hpp"
#include "ptr/prompt.hpp"

namespace ptr::trainer {

struct TrainConfig {
  double learning_rate = 1e-3;
  double warmup_fraction = 0.10;
  double weight_decay = 1e-2;
  int epochs = 5;
  int batch_size = 16;
  std::uint64_t seed = 1;
  mlm::Objective objective = mlm::Objective::kPtr;

  void check() const;  // throws UsageError
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct FewShotConfig {
  std::vector<int> ks = {8, 16, 32};
  std::vector<std::uint64_t> seeds = {13, 21, 42, 87, 100};

  void check() const;  // throws UsageError
  friend bool operator==(const FewShotConfig&, const FewShotConfig&) = default;
};

/// Number of warmup steps: ceil(warmup_fraction * total_steps), where a
/// product within 1e-9 of an integer counts as that integer, capped at
/// total_steps - 1.
int warmup_steps(int total_steps, double warmup_fraction);

/// peak * step / W for step < W, then peak * (total - step) / (total - W).
/// Optimizer update k (0-based) uses lr_at(k).
double lr_at(int step, int total_steps, const TrainConfig& cfg);

struct AdamState {
  std::uint64_t step = 0;
  mlm::Parameters m;
  mlm::Parameters v;

  static AdamState zeros_like(const mlm::Parameters& params);
};

/// theta <- theta - lr*wd*theta, then a bias-corrected Adam step
/// (beta1 0.9, beta2 0.999, eps 1e-8). Throws NumericError on a non-finite
/// gradient, leaving parameters and state untouched.
void adam_step(mlm::Parameters& params, const mlm::Parameters& grads, AdamState& state, double lr,
               double weight_decay);

struct StepRecord {
  int step = 0;
  double lr = 0.0;
  double loss = 0.0;  // batch loss before the update
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;  // mean of the epoch's batch losses
  double dev_f1 = 0.0;
};

struct TrainHistory {
  std::vector<StepRecord> steps;
  std::vector<EpochRecord> epochs;
  double initial_loss = 0.0;  // full training set, before the first update
  double final_loss = 0.0;    // full training set, after the last update
  int best_epoch = 0;         // 0 when no epoch ran
  bool dev_empty = false;     // no dev set: the last checkpoint was returned
};

struct TrainResult {
  mlm::TinyMLM best;
  TrainHistory history;
};

/// Runs epochs x ceil(|train| / batch_size) updates. Each epoch shuffles the
/// identity permutation with Fisher-Yates driven by Rng(derive_seed(seed, 1)),
/// one generator for the whole run. After every epoch the dev micro-F1
/// (negative class excluded) is computed; the earliest epoch with the highest
/// score is returned. Deterministic for a fixed kernel backend.
TrainResult train(const mlm::TinyMLM& model, const prompt::PromptSchema& schema,
                  const corpus::Dataset& train_set, const corpus::Dataset& dev_set, const TrainConfig& cfg);

/// Mean loss over a whole dataset.
double dataset_loss(const mlm::TinyMLM& model, const prompt::PromptSchema& schema,
                    const corpus::Dataset& data, mlm::Objective objective);

/// Predictions in dataset order for the chosen objective.
std::vector<std::string> predict_all(const mlm::TinyMLM& model, const prompt::PromptSchema& schema,
                                     const corpus::Dataset& data, mlm::Objective objective);

struct FewShotSample {
  corpus::Dataset train;
  corpus::Dataset dev;
  std::vector<std::string> train_shortfall;  // classes with fewer than K instances drawn
  std::vector<std::string> dev_shortfall;
};

/// Draws from one pool: per class (inventory order) the class's indices in
/// dataset order are partially Fisher-Yates shuffled with one Rng(seed):
///   for i in [0, min(2K, m)): j = i + uniform_index(m - i); swap(idx[i], idx[j])
/// The first K drawn go to train, the next K to dev, so the two never overlap.
FewShotSample few_shot_sample(const corpus::Dataset& dataset, int k, std::uint64_t seed);

/// Draws K per class from each pool; train uses Rng(derive_seed(seed, 0)),
/// dev uses Rng(derive_seed(seed, 1)).
FewShotSample few_shot_sample(const corpus::Dataset& train_pool, const corpus::Dataset& dev_pool, int k,
                              std::uint64_t seed);

}  // namespace ptr::trainer
