// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "ptr/error.hpp"
#include "ptr/evalkit.hpp"
#include "ptr/rng.hpp"
#include "ptr/trainer.hpp"
#include "test_util.hpp"

namespace ptr::trainer {
namespace {

// ---------------------------------------------------------------- schedule

TEST(LrSchedule, Examples) {
  TrainConfig cfg;
  cfg.learning_rate = 2.0;
  EXPECT_EQ(warmup_steps(100, 0.1), 10);
  EXPECT_DOUBLE_EQ(lr_at(5, 100, cfg), 1.0);
  EXPECT_DOUBLE_EQ(lr_at(10, 100, cfg), 2.0);
  EXPECT_DOUBLE_EQ(lr_at(55, 100, cfg), 1.0);
  EXPECT_DOUBLE_EQ(lr_at(100, 100, cfg), 0.0);
  EXPECT_DOUBLE_EQ(lr_at(0, 100, cfg), 0.0);
}

TEST(LrSchedule, WarmupRounding) {
  EXPECT_EQ(warmup_steps(7, 0.1), 1);    // ceil(0.7)
  EXPECT_EQ(warmup_steps(30, 0.1), 3);   // 0.1 * 30 is 3.0000000000000004 in doubles
  EXPECT_EQ(warmup_steps(31, 0.1), 4);
  EXPECT_EQ(warmup_steps(2, 0.9), 1);    // capped at total - 1
  EXPECT_EQ(warmup_steps(1, 0.5), 0);
  EXPECT_EQ(warmup_steps(50, 0.0), 0);
}

TEST(LrSchedule, ContinuousPiecewiseLinearPeakingAtTheRate) {
  for (int total : {1, 2, 3, 10, 37, 250}) {
    for (double wf : {0.0, 0.1, 0.25, 0.5}) {
      TrainConfig cfg;
      cfg.learning_rate = 0.3;
      cfg.warmup_fraction = wf;
      const int w = warmup_steps(total, wf);
      double peak = 0.0;
      for (int s = 0; s <= total; ++s) {
        const double lr = lr_at(s, total, cfg);
        peak = std::max(peak, lr);
        EXPECT_GE(lr, 0.0);
        if (s > 0 && s <= total) {
          // Slopes: +peak/W inside warmup, -peak/(T-W) after.
          const double slope = lr - lr_at(s - 1, total, cfg);
          const double expected = s <= w ? cfg.learning_rate / w : -cfg.learning_rate / (total - w);
          EXPECT_NEAR(slope, expected, 1e-12) << total << " " << wf << " " << s;
        }
      }
      EXPECT_DOUBLE_EQ(peak, cfg.learning_rate);
    }
  }
}

TEST(Config, Checks) {
  TrainConfig cfg;
  EXPECT_NO_THROW(cfg.check());
  for (auto mutate : std::vector<void (*)(TrainConfig&)>{
           [](TrainConfig& c) { c.learning_rate = 0.0; }, [](TrainConfig& c) { c.warmup_fraction = 1.0; },
           [](TrainConfig& c) { c.warmup_fraction = -0.1; }, [](TrainConfig& c) { c.weight_decay = -1.0; },
           [](TrainConfig& c) { c.epochs = -1; }, [](TrainConfig& c) { c.batch_size = 0; }}) {
    TrainConfig bad;
    mutate(bad);
    EXPECT_THROW(bad.check(), UsageError);
  }
  FewShotConfig fs;
  EXPECT_NO_THROW(fs.check());
  fs.ks = {0};
  EXPECT_THROW(fs.check(), UsageError);
  fs = {};
  fs.seeds.clear();
  EXPECT_THROW(fs.check(), UsageError);
}

// ---------------------------------------------------------------- adam

mlm::Parameters small_params() { return mlm::Parameters::zeros(mlm::ModelConfig{2, 1, 1, 2, 2}, 6, 2); }

std::vector<double*> flat(mlm::Parameters& p) {
  std::vector<double*> out;
  p.visit([&](const std::string&, mlm::Matrix& t) {
    for (double& x : t.values()) out.push_back(&x);
  });
  return out;
}

TEST(Adam, FirstStepIsASignStepOfSizeLr) {
  auto params = small_params();
  auto grads = params;
  Rng rng(1);
  for (double* g : flat(grads)) *g = (rng.uniform01() - 0.5) * 10.0 + (rng.uniform_index(2) ? 1e-3 : -1e-3);
  auto state = AdamState::zeros_like(params);
  adam_step(params, grads, state, 0.01, 0.0);
  const auto p = flat(params);
  const auto g = flat(grads);
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(*p[i], *g[i] > 0 ? -0.01 : 0.01, 1e-6);
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, ZeroGradientWithoutDecayIsAFixedPoint) {
  auto params = small_params();
  Rng rng(2);
  for (double* x : flat(params)) *x = rng.normal();
  const auto before = params;
  auto grads = params;
  grads.fill(0.0);
  auto state = AdamState::zeros_like(params);
  for (int i = 0; i < 5; ++i) adam_step(params, grads, state, 0.1, 0.0);
  EXPECT_TRUE(params == before);
}

double norm(mlm::Parameters& p) {
  double s = 0.0;
  for (double* x : flat(p)) s += *x * *x;
  return std::sqrt(s);
}

TEST(Adam, WeightDecayShrinksNormEveryStep) {
  auto params = small_params();
  Rng rng(3);
  for (double* x : flat(params)) *x = rng.normal();
  auto grads = params;
  grads.fill(0.0);
  auto state = AdamState::zeros_like(params);
  double last = norm(params);
  for (int i = 0; i < 10; ++i) {
    adam_step(params, grads, state, 0.05, 0.1);
    const double now = norm(params);
    EXPECT_LT(now, last);
    EXPECT_NEAR(now, last * (1.0 - 0.05 * 0.1), 1e-12);
    last = now;
  }
}

// Hand-rolled Adam on f(a, b) = 3 (a - 1)^2 + 0.5 (b + 2)^2, placed in the
// first two coordinates of the parameter set; the rest have zero gradient.
TEST(Adam, ThreeStepsOnAQuadraticMatchOracle) {
  const double lr = 0.1, wd = 0.01, b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double theta[2] = {0.5, 0.25}, m[2] = {0, 0}, v[2] = {0, 0};
  auto params = small_params();
  auto pf = flat(params);
  *pf[0] = theta[0];
  *pf[1] = theta[1];
  auto state = AdamState::zeros_like(params);
  for (int t = 1; t <= 3; ++t) {
    const double g[2] = {6.0 * (theta[0] - 1.0), 1.0 * (theta[1] + 2.0)};
    for (int i = 0; i < 2; ++i) {
      theta[i] -= lr * wd * theta[i];
      m[i] = b1 * m[i] + (1 - b1) * g[i];
      v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
      const double mhat = m[i] / (1 - std::pow(b1, t));
      const double vhat = v[i] / (1 - std::pow(b2, t));
      theta[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
    auto grads = params;
    grads.fill(0.0);
    auto gf = flat(grads);
    *gf[0] = 6.0 * (*pf[0] - 1.0);
    *gf[1] = 1.0 * (*pf[1] + 2.0);
    adam_step(params, grads, state, lr, wd);
    EXPECT_NEAR(*pf[0], theta[0], 1e-14) << "step " << t;
    EXPECT_NEAR(*pf[1], theta[1], 1e-14) << "step " << t;
    EXPECT_EQ(*pf[2], 0.0);
  }
  EXPECT_GT(theta[0], 0.5 + 2 * lr);  // moved toward the minimum at 1
}

TEST(Adam, NonFiniteGradientLeavesStateUntouched) {
  auto params = small_params();
  auto grads = params;
  grads.fill(1.0);
  flat(grads).back()[0] = std::nan("");
  auto state = AdamState::zeros_like(params);
  const auto before = params;
  EXPECT_THROW(adam_step(params, grads, state, 0.1, 0.1), NumericError);
  EXPECT_TRUE(params == before);
  EXPECT_EQ(state.step, 0u);
}

TEST(Adam, ShapeMismatch) {
  auto params = small_params();
  auto grads = mlm::Parameters::zeros(mlm::ModelConfig{2, 1, 1, 2, 2}, 7, 2);
  auto state = AdamState::zeros_like(params);
  EXPECT_THROW(adam_step(params, grads, state, 0.1, 0.0), ShapeError);
}

// ---------------------------------------------------------------- train

// Two classes told apart by one cue word anywhere in the sentence.
struct Separable {
  dsl::TaskSpec spec = dsl::parse_task_spec(R"(
predicate sentiment(text) { template: <text> it was [MASK] .; labels: "great", "terrible"; }
classes { positive; negative; }
rule positive = sentiment("great");
rule negative = sentiment("terrible");
)");
  prompt::PromptSchema schema = prompt::compile(spec);
  corpus::Dataset train, dev;

  Separable() {
    Rng rng(11);
    const std::vector<std::string> filler = {"the", "film", "plot", "was", "and", "cast", "very", "so"};
    auto make = [&](corpus::Dataset& d, int n, const std::string& split) {
      d.split = split;
      d.classes = spec.classes;
      for (int i = 0; i < n; ++i) {
        const bool pos = i % 2 == 0;
        Instance inst;
        inst.id = split + std::to_string(i);
        for (int k = 0; k < 5; ++k) inst.tokens.push_back(filler[rng.uniform_index(filler.size())]);
        inst.tokens.insert(inst.tokens.begin() + static_cast<long>(rng.uniform_index(6)), pos ? "good" : "bad");
        inst.subj = {0, 1};
        inst.obj = {1, 2};
        inst.label = pos ? "positive" : "negative";
        d.instances.push_back(inst);
      }
    };
    make(train, 40, "train");
    make(dev, 20, "dev");
  }

  mlm::TinyMLM model(mlm::Objective = mlm::Objective::kPtr) const {
    std::vector<Instance> all = train.instances;
    all.insert(all.end(), dev.instances.begin(), dev.instances.end());
    mlm::TinyMLM m(mlm::ModelConfig{32, 2, 4, 64, 16}, mlm::build_vocab(schema, all), schema.class_labels());
    m.initialize(5);
    return m;
  }

  TrainConfig config(mlm::Objective objective) const {
    TrainConfig cfg;
    cfg.learning_rate = 1e-2;
    cfg.epochs = 5;
    cfg.batch_size = 4;
    cfg.seed = 3;
    cfg.objective = objective;
    return cfg;
  }
};

std::vector<std::string> golds(const corpus::Dataset& d) {
  std::vector<std::string> out;
  for (const auto& inst : d.instances) out.push_back(inst.label);
  return out;
}

TEST(Train, SeparableTaskIsLearnedByBothObjectives) {
  const Separable fx;
  for (auto objective : {mlm::Objective::kPtr, mlm::Objective::kClsBaseline}) {
    const auto cfg = fx.config(objective);
    const auto r = train(fx.model(), fx.schema, fx.train, fx.dev, cfg);
    EXPECT_LT(r.history.final_loss, r.history.initial_loss);
    const auto preds = predict_all(r.best, fx.schema, fx.dev, objective);
    EXPECT_DOUBLE_EQ(evalkit::micro_f1(preds, golds(fx.dev), std::nullopt).micro_f1, 1.0)
        << mlm::objective_name(objective);
    EXPECT_EQ(r.history.steps.size(), 50u);  // 5 epochs x 10 batches
    EXPECT_EQ(r.history.epochs.size(), 5u);
  }
}

TEST(Train, HistoryFollowsTheSchedule) {
  const Separable fx;
  const auto cfg = fx.config(mlm::Objective::kPtr);
  const auto r = train(fx.model(), fx.schema, fx.train, fx.dev, cfg);
  for (const auto& s : r.history.steps) EXPECT_EQ(s.lr, lr_at(s.step, 50, cfg));
  // The returned checkpoint is the earliest epoch with the best dev score.
  double best = -1.0;
  int best_epoch = 0;
  for (const auto& e : r.history.epochs) {
    if (e.dev_f1 > best) {
      best = e.dev_f1;
      best_epoch = e.epoch;
    }
  }
  EXPECT_EQ(r.history.best_epoch, best_epoch);
}

TEST(Train, IsDeterministicAndLeavesInputsAlone) {
  const Separable fx;
  const auto model = fx.model();
  const auto train_copy = fx.train;
  const auto cfg = fx.config(mlm::Objective::kPtr);
  const auto a = train(model, fx.schema, fx.train, fx.dev, cfg);
  const auto b = train(model, fx.schema, fx.train, fx.dev, cfg);
  ASSERT_EQ(a.history.steps.size(), b.history.steps.size());
  for (std::size_t i = 0; i < a.history.steps.size(); ++i) {
    EXPECT_EQ(a.history.steps[i].loss, b.history.steps[i].loss);
  }
  EXPECT_TRUE(a.best == b.best);
  EXPECT_TRUE(model == fx.model());
  EXPECT_EQ(fx.train, train_copy);
  auto other = cfg;
  other.seed = 4;
  EXPECT_NE(train(model, fx.schema, fx.train, fx.dev, other).history.steps[0].loss, a.history.steps[0].loss);
}

TEST(Train, ZeroEpochsReturnsTheInitialModel) {
  const Separable fx;
  auto cfg = fx.config(mlm::Objective::kPtr);
  cfg.epochs = 0;
  const auto r = train(fx.model(), fx.schema, fx.train, fx.dev, cfg);
  EXPECT_TRUE(r.best == fx.model());
  EXPECT_TRUE(r.history.steps.empty());
  EXPECT_TRUE(r.history.epochs.empty());
  EXPECT_EQ(r.history.best_epoch, 0);
}

TEST(Train, EmptyDevReturnsTheLastCheckpoint) {
  const Separable fx;
  auto cfg = fx.config(mlm::Objective::kPtr);
  cfg.epochs = 2;
  const auto r = train(fx.model(), fx.schema, fx.train, corpus::Dataset{}, cfg);
  EXPECT_TRUE(r.history.dev_empty);
  EXPECT_EQ(r.history.best_epoch, 2);
  EXPECT_DOUBLE_EQ(dataset_loss(r.best, fx.schema, fx.train, cfg.objective), r.history.final_loss);
}

TEST(Train, Errors) {
  const Separable fx;
  const auto cfg = fx.config(mlm::Objective::kPtr);
  EXPECT_THROW(train(fx.model(), fx.schema, corpus::Dataset{}, fx.dev, cfg), DataError);
  auto bad = fx.train;
  bad.instances[0].label = "neutral";
  EXPECT_THROW(train(fx.model(), fx.schema, bad, fx.dev, cfg), DataError);
}

// ---------------------------------------------------------------- few-shot

corpus::Dataset pool(int n, const std::string& prefix) {
  corpus::Dataset d;
  d.split = prefix;
  d.classes = {"c0", "c1", "c2"};
  for (int i = 0; i < n; ++i) {
    d.instances.push_back(test::make_instance(prefix + std::to_string(i), "x y", {0, 1}, {1, 2}, "c" + std::to_string(i % 3)));
  }
  return d;
}

std::string ids(const corpus::Dataset& d) {
  std::string out;
  for (const auto& inst : d.instances) out += (out.empty() ? "" : ",") + inst.id;
  return out;
}

// Goldens from tests/oracles/fewshot_oracle.py, an independent Python port
// of the generator and both samplers.
TEST(FewShot, TwoPoolMatchesOracle) {
  struct Golden {
    std::uint64_t seed;
    int k;
    const char* train;
    const char* dev;
  };
  const Golden goldens[] = {
      {13, 2, "t6,t30,t37,t16,t17,t2", "d27,d21,d13,d19,d26,d14"},
      {13, 4, "t6,t30,t42,t39,t16,t1,t22,t28,t8,t53,t20,t29", "d27,d21,d6,d18,d25,d13,d28,d19,d2,d8,d5,d11"},
      {21, 2, "t39,t15,t16,t49,t8,t14", "d0,d9,d4,d10,d5,d26"},
      {21, 4, "t39,t15,t33,t57,t7,t13,t22,t46,t41,t29,t50,t53", "d0,d9,d15,d24,d4,d25,d22,d28,d14,d20,d23,d17"},
      {42, 2, "t3,t9,t13,t37,t53,t59", "d18,d9,d13,d19,d29,d26"},
      {42, 4, "t3,t9,t12,t18,t52,t58,t46,t43,t59,t53,t11,t50", "d18,d9,d24,d3,d28,d25,d22,d16,d29,d8,d26,d23"},
      {87, 2, "t57,t54,t31,t34,t29,t47", "d15,d6,d4,d16,d2,d17"},
      {87, 4, "t57,t54,t24,t48,t28,t46,t25,t1,t41,t20,t8,t53", "d15,d6,d21,d12,d1,d16,d4,d13,d2,d17,d8,d20"},
      {100, 2, "t12,t21,t4,t1,t44,t5", "d21,d9,d22,d1,d8,d23"},
      {100, 4, "t12,t21,t9,t27,t43,t4,t52,t16,t32,t35,t26,t44", "d21,d9,d15,d27,d7,d22,d13,d19,d2,d11,d14,d26"},
  };
  const auto train_pool = pool(60, "t");
  const auto dev_pool = pool(30, "d");
  for (const auto& g : goldens) {
    const auto s = few_shot_sample(train_pool, dev_pool, g.k, g.seed);
    EXPECT_EQ(ids(s.train), g.train) << g.seed << " " << g.k;
    EXPECT_EQ(ids(s.dev), g.dev) << g.seed << " " << g.k;
    EXPECT_TRUE(s.train_shortfall.empty());
  }
}

TEST(FewShot, SinglePoolMatchesOracle) {
  struct Golden {
    std::uint64_t seed;
    const char* train;
    const char* dev;
  };
  const Golden goldens[] = {
      {13, "t33,t3,t21,t10,t25,t58,t44,t5,t50", "t9,t36,t24,t46,t4,t16,t53,t35,t26"},
      {21, "t6,t51,t42,t16,t40,t28,t26,t17,t11", "t45,t15,t21,t22,t46,t55,t53,t5,t59"},
      {42, "t18,t0,t3,t49,t4,t37,t38,t5,t53", "t6,t27,t39,t34,t46,t52,t56,t32,t14"},
      {87, "t30,t6,t42,t49,t34,t55,t41,t29,t47", "t54,t33,t51,t16,t46,t22,t38,t35,t32"},
      {100, "t54,t39,t30,t28,t1,t49,t26,t23,t14", "t27,t6,t18,t22,t13,t40,t17,t11,t53"},
  };
  const auto data = pool(60, "t");
  for (const auto& g : goldens) {
    const auto s = few_shot_sample(data, 3, g.seed);
    EXPECT_EQ(ids(s.train), g.train) << g.seed;
    EXPECT_EQ(ids(s.dev), g.dev) << g.seed;
  }
}

TEST(FewShot, SinglePoolSubsetsAreDisjoint) {
  const auto data = pool(60, "t");
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = few_shot_sample(data, 1 + static_cast<int>(seed % 10), seed);
    for (const auto& a : s.train.instances) {
      for (const auto& b : s.dev.instances) EXPECT_NE(a.id, b.id);
    }
  }
}

TEST(FewShot, ShortfallAndArithmetic) {
  auto d = pool(60, "t");
  d.classes.push_back("rare");
  d.instances.push_back(test::make_instance("only", "x y", {0, 1}, {1, 2}, "rare"));
  const auto s = few_shot_sample(d, d, 8, 7);
  EXPECT_EQ(s.train.size(), 3u * 8 + 1);
  EXPECT_EQ(s.train_shortfall, std::vector<std::string>{"rare"});
  EXPECT_EQ(s.train.instances.back().id, "only");
  const auto single = few_shot_sample(d, 8, 7);
  EXPECT_EQ(single.train.size(), 3u * 8 + 1);
  EXPECT_EQ(single.dev.size(), 3u * 8);
  EXPECT_EQ(single.dev_shortfall, std::vector<std::string>{"rare"});
  EXPECT_EQ(ids(few_shot_sample(d, d, 8, 7).train), ids(s.train));
  EXPECT_THROW(few_shot_sample(d, 0, 7), UsageError);
}

}  // namespace
}  // namespace ptr::trainer
