// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

// Micro-F1 with negative-class exclusion, few-shot sweeps and report emission.

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ptr/corpus.hpp"
#include "ptr/mlm/model.hpp"
#include "ptr/trainer.hpp"

namespace ptr::evalkit {

struct ClassCounts {
  std::string label;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t support = 0;  // gold count

  double precision() const;
  double recall() const;
  double f1() const;
};

struct EvalReport {
  // Primary: pooled over every class except the negative one.
  double micro_precision = 0.0;
  double micro_recall = 0.0;
  double micro_f1 = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0;
  // Same pooling with the negative class counted like any other.
  double micro_f1_all = 0.0;
  std::vector<ClassCounts> per_class;  // first-seen order over golds, then predictions
  std::size_t n_instances = 0;
  std::optional<std::string> negative_class;
};

/// Predicting the negative class is neither TP nor FP; a non-negative gold
/// that is missed counts as FN. Throws ShapeError on length mismatch or empty
/// input.
EvalReport micro_f1(const std::vector<std::string>& preds, const std::vector<std::string>& golds,
                    const std::optional<std::string>& negative_class);

nlohmann::ordered_json report_to_json(const EvalReport& report);

/// Columns class,P,R,F1,TP,FP,FN; one row per class, then "micro" (negative
/// excluded) and "micro_all". Percentages with one decimal, LF endings.
std::string report_csv(const EvalReport& report);

/// "50.0" for 0.5.
std::string percent(double value);

struct SweepCell {
  int k = 0;
  std::uint64_t seed = 0;
  double f1 = 0.0;
  std::optional<std::string> error;  // the cell failed; excluded from aggregates
};

struct SweepRow {
  std::string method;
  std::vector<int> ks;
  std::vector<double> mean;  // per K, over successful seeds
  std::vector<double> std;   // population standard deviation per K
  double overall_mean = 0.0;  // mean of the per-K means
  std::vector<SweepCell> cells;
};

struct SweepData {
  corpus::Dataset train_pool;
  corpus::Dataset dev_pool;
  corpus::Dataset test;
};

/// For each K and seed: few_shot_sample(train_pool, dev_pool, K, seed), a fresh
/// model initialized with derive_seed(seed, 2), train with train_cfg (seed
/// replaced by the cell seed), then micro-F1 on the full test set. The
/// vocabulary covers the schema and all three datasets. A failing cell records
/// its error and the sweep continues.
SweepRow sweep_fewshot(const prompt::PromptSchema& schema, const SweepData& data,
                       const mlm::ModelConfig& model_config, const trainer::FewShotConfig& fewshot,
                       const trainer::TrainConfig& train_cfg,
                       const std::function<void(const SweepCell&)>& on_cell = {});

/// Header "method,K=8,...,Mean" then one row per method, one-decimal
/// percentages; empty cells when every seed of a K failed.
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_std_csv(const std::vector<SweepRow>& rows);

/// Writes text exactly; throws DataError when the path is unwritable.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace ptr::evalkit
