// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptr/trainer.hpp"

#include <cmath>
#include <numeric>

#include "ptr/error.hpp"
#include "ptr/evalkit.hpp"
#include "ptr/kernels.hpp"
#include "ptr/rng.hpp"
#include "ptr/scoring.hpp"

namespace ptr::trainer {

namespace {

constexpr std::uint64_t kShuffleStream = 1;

std::vector<mlm::Example> make_examples(const mlm::TinyMLM& model, const prompt::PromptSchema& schema,
                                        const corpus::Dataset& data, mlm::Objective objective) {
  std::vector<mlm::Example> out;
  out.reserve(data.size());
  for (const auto& inst : data.instances) {
    const auto gold = schema.class_index(inst.label);
    if (!gold) throw DataError("instance '" + inst.id + "' has label '" + inst.label + "' not in the task spec");
    if (objective == mlm::Objective::kPtr) {
      const auto orientation =
          schema.classes[*gold].reversed ? prompt::Orientation::kReversed : prompt::Orientation::kForward;
      out.push_back(model.make_ptr_example(schema, prompt::render(schema, inst, orientation), inst.id, gold));
    } else {
      out.push_back(model.make_cls_example(prompt::render_plain(inst), inst.id, gold));
    }
  }
  return out;
}

double batched_loss(const mlm::TinyMLM& model, const std::vector<mlm::Example>& examples,
                    mlm::Objective objective) {
  double total = 0.0;
  for (const auto& ex : examples) total += model.loss_and_gradient({ex}, objective, nullptr);
  return total / static_cast<double>(examples.size());
}

}  // namespace

void TrainConfig::check() const {
  if (!(learning_rate > 0.0)) throw UsageError("learning_rate must be positive");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) throw UsageError("warmup_fraction must lie in [0, 1)");
  if (!(weight_decay >= 0.0)) throw UsageError("weight_decay must be non-negative");
  if (epochs < 0) throw UsageError("epochs must be non-negative");
  if (batch_size <= 0) throw UsageError("batch_size must be positive");
}

void FewShotConfig::check() const {
  for (int k : ks) {
    if (k < 1) throw UsageError("few-shot K must be at least 1");
  }
  if (seeds.empty()) throw UsageError("few-shot seed list is empty");
}

int warmup_steps(int total_steps, double warmup_fraction) {
  if (total_steps <= 1) return 0;
  const double x = warmup_fraction * static_cast<double>(total_steps);
  const double nearest = std::round(x);
  const double w = std::fabs(x - nearest) <= 1e-9 * std::max(1.0, x) ? nearest : std::ceil(x);
  return std::min(static_cast<int>(w), total_steps - 1);
}

double lr_at(int step, int total_steps, const TrainConfig& cfg) {
  if (total_steps < 1 || step < 0 || step >= total_steps) return 0.0;
  const int w = warmup_steps(total_steps, cfg.warmup_fraction);
  const double peak = cfg.learning_rate;
  if (step < w) return peak * (static_cast<double>(step) / static_cast<double>(w));
  return peak * (static_cast<double>(total_steps - step) / static_cast<double>(total_steps - w));
}

AdamState AdamState::zeros_like(const mlm::Parameters& params) {
  AdamState s;
  s.m = params;
  s.m.fill(0.0);
  s.v = s.m;
  return s;
}

void adam_step(mlm::Parameters& params, const mlm::Parameters& grads, AdamState& state, double lr,
               double weight_decay) {
  std::vector<mlm::Matrix*> p, m, v;
  std::vector<const mlm::Matrix*> g;
  std::vector<std::string> names;
  params.visit([&](const std::string& name, mlm::Matrix& t) {
    p.push_back(&t);
    names.push_back(name);
  });
  grads.visit([&](const std::string&, const mlm::Matrix& t) { g.push_back(&t); });
  state.m.visit([&](const std::string&, mlm::Matrix& t) { m.push_back(&t); });
  state.v.visit([&](const std::string&, mlm::Matrix& t) { v.push_back(&t); });
  if (g.size() != p.size() || m.size() != p.size() || v.size() != p.size()) {
    throw ShapeError("adam_step: parameter, gradient and state layouts differ");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!g[i]->same_shape(*p[i]) || !m[i]->same_shape(*p[i]) || !v[i]->same_shape(*p[i])) {
      throw ShapeError("adam_step: shape mismatch in " + names[i]);
    }
    for (double x : g[i]->values()) {
      if (!std::isfinite(x)) throw NumericError("non-finite gradient in " + names[i]);
    }
  }
  ++state.step;
  kernels::AdamCoefficients c;
  c.lr = lr;
  c.weight_decay = weight_decay;
  c.bias_correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  c.bias_correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < p.size(); ++i) {
    k.adam_update(p[i]->data(), g[i]->data(), m[i]->data(), v[i]->data(), p[i]->size(), c);
  }
}

std::vector<std::string> predict_all(const mlm::TinyMLM& model, const prompt::PromptSchema& schema,
                                     const corpus::Dataset& data, mlm::Objective objective) {
  std::vector<std::string> out;
  out.reserve(data.size());
  for (const auto& inst : data.instances) {
    out.push_back(objective == mlm::Objective::kPtr ? scoring::predict(model, schema, inst)
                                                    : scoring::predict_baseline(model, inst));
  }
  return out;
}

double dataset_loss(const mlm::TinyMLM& model, const prompt::PromptSchema& schema,
                    const corpus::Dataset& data, mlm::Objective objective) {
  if (data.instances.empty()) throw ShapeError("dataset_loss: empty dataset");
  return batched_loss(model, make_examples(model, schema, data, objective), objective);
}

TrainResult train(const mlm::TinyMLM& model, const prompt::PromptSchema& schema,
                  const corpus::Dataset& train_set, const corpus::Dataset& dev_set, const TrainConfig& cfg) {
  cfg.check();
  TrainResult result{model, {}};
  if (cfg.epochs == 0) return result;
  if (train_set.instances.empty()) throw DataError("training set is empty");

  const auto examples = make_examples(model, schema, train_set, cfg.objective);
  const std::size_t n = examples.size();
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  const int per_epoch = static_cast<int>((n + batch - 1) / batch);
  const int total = per_epoch * cfg.epochs;

  mlm::TinyMLM current = model;
  TrainHistory& h = result.history;
  h.dev_empty = dev_set.instances.empty();
  h.initial_loss = batched_loss(current, examples, cfg.objective);

  AdamState state = AdamState::zeros_like(current.params());
  mlm::Parameters grad = state.m;
  Rng shuffle_rng(derive_seed(cfg.seed, kShuffleStream));
  std::vector<std::size_t> order(n);
  std::vector<mlm::Example> chunk;
  double best_f1 = -1.0;
  int step = 0;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n; i-- > 1;) std::swap(order[i], order[shuffle_rng.uniform_index(i + 1)]);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      chunk.clear();
      for (std::size_t i = start; i < std::min(n, start + batch); ++i) chunk.push_back(examples[order[i]]);
      grad.fill(0.0);
      const double loss = current.loss_and_gradient(chunk, cfg.objective, &grad);
      const double lr = lr_at(step, total, cfg);
      adam_step(current.params(), grad, state, lr, cfg.weight_decay);
      h.steps.push_back({step, lr, loss});
      epoch_loss += loss;
      ++step;
    }

    EpochRecord rec{epoch, epoch_loss / per_epoch, 0.0};
    if (!h.dev_empty) {
      const auto preds = predict_all(current, schema, dev_set, cfg.objective);
      std::vector<std::string> golds;
      for (const auto& inst : dev_set.instances) golds.push_back(inst.label);
      rec.dev_f1 = evalkit::micro_f1(preds, golds, schema.negative_class).micro_f1;
      if (rec.dev_f1 > best_f1) {
        best_f1 = rec.dev_f1;
        h.best_epoch = epoch;
        result.best = current;
      }
    }
    h.epochs.push_back(rec);
  }
  if (h.dev_empty) {
    h.best_epoch = cfg.epochs;
    result.best = current;
  }
  h.final_loss = batched_loss(current, examples, cfg.objective);
  return result;
}

FewShotSample few_shot_sample(const corpus::Dataset& dataset, int k, std::uint64_t seed) {
  if (k < 1) throw UsageError("few-shot K must be at least 1");
  FewShotSample out;
  out.train.split = dataset.split + "-fewshot-train";
  out.dev.split = dataset.split + "-fewshot-dev";
  out.train.classes = out.dev.classes = dataset.classes;
  const auto kk = static_cast<std::size_t>(k);
  Rng rng(seed);
  for (const auto& label : dataset.classes) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (dataset.instances[i].label == label) idx.push_back(i);
    }
    const std::size_t m = idx.size();
    const std::size_t draws = std::min(2 * kk, m);
    for (std::size_t i = 0; i < draws; ++i) std::swap(idx[i], idx[i + rng.uniform_index(m - i)]);
    for (std::size_t i = 0; i < draws; ++i) {
      (i < kk ? out.train : out.dev).instances.push_back(dataset.instances[idx[i]]);
    }
    if (m < kk) out.train_shortfall.push_back(label);
    if (m < 2 * kk) out.dev_shortfall.push_back(label);
  }
  return out;
}

namespace {

corpus::Dataset draw_per_class(const corpus::Dataset& pool, std::size_t k, Rng& rng,
                               std::vector<std::string>& shortfall) {
  corpus::Dataset out;
  out.split = pool.split + "-fewshot";
  out.classes = pool.classes;
  for (const auto& label : pool.classes) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool.instances[i].label == label) idx.push_back(i);
    }
    const std::size_t m = idx.size();
    const std::size_t draws = std::min(k, m);
    for (std::size_t i = 0; i < draws; ++i) std::swap(idx[i], idx[i + rng.uniform_index(m - i)]);
    for (std::size_t i = 0; i < draws; ++i) out.instances.push_back(pool.instances[idx[i]]);
    if (m < k) shortfall.push_back(label);
  }
  return out;
}

}  // namespace

FewShotSample few_shot_sample(const corpus::Dataset& train_pool, const corpus::Dataset& dev_pool, int k,
                              std::uint64_t seed) {
  if (k < 1) throw UsageError("few-shot K must be at least 1");
  FewShotSample out;
  Rng train_rng(derive_seed(seed, 0));
  Rng dev_rng(derive_seed(seed, 1));
  out.train = draw_per_class(train_pool, static_cast<std::size_t>(k), train_rng, out.train_shortfall);
  out.dev = draw_per_class(dev_pool, static_cast<std::size_t>(k), dev_rng, out.dev_shortfall);
  return out;
}

}  // namespace ptr::trainer
