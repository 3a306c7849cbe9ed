// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "ptr/error.hpp"
#include "ptr/evalkit.hpp"
#include "ptr/rng.hpp"

namespace ptr::evalkit {

namespace {

constexpr std::uint64_t kInitStream = 2;

std::vector<Instance> all_instances(const SweepData& data) {
  std::vector<Instance> out = data.train_pool.instances;
  out.insert(out.end(), data.dev_pool.instances.begin(), data.dev_pool.instances.end());
  out.insert(out.end(), data.test.instances.begin(), data.test.instances.end());
  return out;
}

std::string table_csv(const std::vector<SweepRow>& rows, bool use_std) {
  std::vector<int> ks = rows.empty() ? std::vector<int>{} : rows.front().ks;
  std::string out = "method";
  for (int k : ks) out += ",K=" + std::to_string(k);
  out += ",Mean\n";
  for (const auto& row : rows) {
    if (row.ks != ks) throw ShapeError("sweep rows disagree on K values");
    out += row.method;
    for (std::size_t i = 0; i < ks.size(); ++i) out += "," + percent(use_std ? row.std[i] : row.mean[i]);
    if (use_std) {
      out += ",\n";
    } else {
      out += "," + percent(row.overall_mean) + "\n";
    }
  }
  return out;
}

}  // namespace

SweepRow sweep_fewshot(const prompt::PromptSchema& schema, const SweepData& data,
                       const mlm::ModelConfig& model_config, const trainer::FewShotConfig& fewshot,
                       const trainer::TrainConfig& train_cfg, const std::function<void(const SweepCell&)>& on_cell) {
  fewshot.check();
  train_cfg.check();
  if (data.test.instances.empty()) throw DataError("sweep: test set is empty");
  const mlm::Vocab vocab = mlm::build_vocab(schema, all_instances(data));
  std::vector<std::string> golds;
  for (const auto& inst : data.test.instances) golds.push_back(inst.label);

  SweepRow row;
  row.method = std::string(mlm::objective_name(train_cfg.objective));
  row.ks = fewshot.ks;
  for (int k : fewshot.ks) {
    double sum = 0.0, sum_sq = 0.0;
    int ok = 0;
    for (std::uint64_t seed : fewshot.seeds) {
      SweepCell cell{k, seed, 0.0, std::nullopt};
      try {
        const auto sample = trainer::few_shot_sample(data.train_pool, data.dev_pool, k, seed);
        mlm::TinyMLM model(model_config, vocab, schema.class_labels());
        model.initialize(derive_seed(seed, kInitStream));
        trainer::TrainConfig cfg = train_cfg;
        cfg.seed = seed;
        const auto result = trainer::train(model, schema, sample.train, sample.dev, cfg);
        const auto preds = trainer::predict_all(result.best, schema, data.test, cfg.objective);
        cell.f1 = micro_f1(preds, golds, schema.negative_class).micro_f1;
        sum += cell.f1;
        sum_sq += cell.f1 * cell.f1;
        ++ok;
      } catch (const Error& e) {
        cell.error = e.what();
      }
      if (on_cell) on_cell(cell);
      row.cells.push_back(cell);
    }
    const double mean = ok ? sum / ok : std::nan("");
    row.mean.push_back(mean);
    row.std.push_back(ok ? std::sqrt(std::max(0.0, sum_sq / ok - mean * mean)) : std::nan(""));
  }
  double total = 0.0;
  for (double m : row.mean) total += m;
  row.overall_mean = row.mean.empty() ? std::nan("") : total / static_cast<double>(row.mean.size());
  return row;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) { return table_csv(rows, false); }

std::string sweep_std_csv(const std::vector<SweepRow>& rows) { return table_csv(rows, true); }

}  // namespace ptr::evalkit
