// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "ptr/error.hpp"
#include "ptr/evalkit.hpp"
#include "ptr/rng.hpp"
#include "test_util.hpp"

namespace ptr::evalkit {
namespace {

using Labels = std::vector<std::string>;

TEST(MicroF1, PerfectPredictions) {
  const Labels g = {"a", "b", "nr", "a"};
  const auto r = micro_f1(g, g, "nr");
  EXPECT_DOUBLE_EQ(r.micro_f1, 1.0);
  EXPECT_DOUBLE_EQ(r.micro_f1_all, 1.0);
  EXPECT_EQ(r.n_instances, 4u);
}

TEST(MicroF1, AllNegativePredictionsScoreZero) {
  const auto r = micro_f1({"nr", "nr", "nr"}, {"a", "nr", "b"}, "nr");
  EXPECT_EQ(r.tp, 0u);
  EXPECT_EQ(r.fp, 0u);
  EXPECT_EQ(r.fn, 2u);
  EXPECT_DOUBLE_EQ(r.micro_f1, 0.0);
  EXPECT_DOUBLE_EQ(r.micro_f1_all, 1.0 / 3);
}

TEST(MicroF1, HandTally) {
  // a, b correct; gold c missed as nr (FN); gold nr predicted as c (FP).
  const auto r = micro_f1({"a", "b", "nr", "c"}, {"a", "b", "c", "nr"}, "nr");
  EXPECT_EQ(r.tp, 2u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn, 1u);
  EXPECT_DOUBLE_EQ(r.micro_precision, 2.0 / 3);
  EXPECT_DOUBLE_EQ(r.micro_recall, 2.0 / 3);
  EXPECT_DOUBLE_EQ(r.micro_f1, 2.0 / 3);
}

TEST(MicroF1, WrongPositiveIsBothFpAndFn) {
  const auto r = micro_f1({"b"}, {"a"}, "nr");
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn, 1u);
  ASSERT_EQ(r.per_class.size(), 2u);
  EXPECT_EQ(r.per_class[0].label, "a");
  EXPECT_EQ(r.per_class[0].fn, 1u);
  EXPECT_EQ(r.per_class[1].fp, 1u);
}

TEST(MicroF1, Errors) {
  EXPECT_THROW(micro_f1({"a"}, {"a", "b"}, std::nullopt), ShapeError);
  EXPECT_THROW(micro_f1({}, {}, std::nullopt), ShapeError);
}

// Straight tally without the implementation's bookkeeping.
struct Tally {
  std::size_t tp = 0, fp = 0, fn = 0;
};

Tally tally(const Labels& p, const Labels& g, const std::string& neg) {
  Tally t;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == g[i] && p[i] != neg) ++t.tp;
    if (p[i] != g[i] && p[i] != neg) ++t.fp;
    if (p[i] != g[i] && g[i] != neg) ++t.fn;
  }
  return t;
}

TEST(Properties, RandomLabelsAgreeWithTallyAndStayInRange) {
  Rng rng(12);
  const Labels classes = {"nr", "a", "b", "c"};
  for (int i = 0; i < 2000; ++i) {
    const std::size_t n = 1 + rng.uniform_index(30);
    Labels p, g;
    for (std::size_t k = 0; k < n; ++k) {
      p.push_back(classes[rng.uniform_index(4)]);
      g.push_back(classes[rng.uniform_index(4)]);
    }
    const auto r = micro_f1(p, g, "nr");
    const auto t = tally(p, g, "nr");
    EXPECT_EQ(r.tp, t.tp);
    EXPECT_EQ(r.fp, t.fp);
    EXPECT_EQ(r.fn, t.fn);
    for (double x : {r.micro_precision, r.micro_recall, r.micro_f1, r.micro_f1_all}) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
    if (r.tp == 0) EXPECT_EQ(r.micro_f1, 0.0);
    if (r.micro_precision + r.micro_recall > 0) {
      EXPECT_NEAR(r.micro_f1, 2 * r.micro_precision * r.micro_recall / (r.micro_precision + r.micro_recall), 1e-15);
    }
    std::size_t support = 0;
    for (const auto& c : r.per_class) support += c.support;
    EXPECT_EQ(support, n);

    // Permutation invariance over (pred, gold) pairs.
    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    for (std::size_t k = n; k-- > 1;) std::swap(order[k], order[rng.uniform_index(k + 1)]);
    Labels pp, gg;
    for (auto k : order) {
      pp.push_back(p[k]);
      gg.push_back(g[k]);
    }
    const auto s = micro_f1(pp, gg, "nr");
    EXPECT_EQ(s.micro_f1, r.micro_f1);
    EXPECT_EQ(s.tp, r.tp);
    EXPECT_EQ(s.micro_f1_all, r.micro_f1_all);
  }
}

TEST(Properties, ExcludingAnAbsentClassChangesNothing) {
  Rng rng(13);
  for (int i = 0; i < 200; ++i) {
    Labels p, g;
    for (int k = 0; k < 10; ++k) {
      p.push_back(std::string(1, static_cast<char>('a' + rng.uniform_index(3))));
      g.push_back(std::string(1, static_cast<char>('a' + rng.uniform_index(3))));
    }
    const auto with = micro_f1(p, g, "zzz");
    const auto without = micro_f1(p, g, std::nullopt);
    EXPECT_EQ(with.micro_f1, without.micro_f1);
    EXPECT_EQ(with.tp, without.tp);
    EXPECT_EQ(with.fp, without.fp);
    EXPECT_EQ(with.fn, without.fn);
  }
}

TEST(Reports, Formatting) {
  EXPECT_EQ(percent(0.5), "50.0");
  EXPECT_EQ(percent(2.0 / 3), "66.7");
  EXPECT_EQ(percent(1.0), "100.0");
  EXPECT_EQ(percent(std::nan("")), "");
  const auto r = micro_f1({"a", "b", "nr", "c"}, {"a", "b", "c", "nr"}, "nr");
  EXPECT_EQ(report_csv(r),
            "class,P,R,F1,TP,FP,FN\n"
            "a,100.0,100.0,100.0,1,0,0\n"
            "b,100.0,100.0,100.0,1,0,0\n"
            "c,0.0,0.0,0.0,0,1,1\n"
            "nr,0.0,0.0,0.0,0,1,1\n"
            "micro,66.7,66.7,66.7,2,1,1\n"
            "micro_all,50.0,50.0,50.0,2,2,2\n");
  const auto doc = report_to_json(r);
  EXPECT_EQ(doc["negative_class"], "nr");
  EXPECT_EQ(doc["per_class"].size(), 4u);
  EXPECT_EQ(doc.begin().key(), "n_instances");
}

TEST(Reports, SweepTables) {
  EXPECT_EQ(sweep_csv({}), "method,Mean\n");
  SweepRow ptr_row{"ptr", {8, 16}, {0.5, 0.75}, {0.1, 0.0}, 0.625, {}};
  SweepRow cls_row{"cls-baseline", {8, 16}, {0.25, std::nan("")}, {0.05, std::nan("")}, 0.25, {}};
  EXPECT_EQ(sweep_csv({ptr_row, cls_row}), "method,K=8,K=16,Mean\nptr,50.0,75.0,62.5\ncls-baseline,25.0,,25.0\n");
  EXPECT_EQ(sweep_std_csv({ptr_row}), "method,K=8,K=16,Mean\nptr,10.0,0.0,\n");
  SweepRow other{"x", {8}, {0.5}, {0.0}, 0.5, {}};
  EXPECT_THROW(sweep_csv({ptr_row, other}), ShapeError);
}

TEST(Reports, WriteText) {
  const auto path = std::filesystem::temp_directory_path() / "ptr_test_write_text.csv";
  write_text(path, "a,b\n");
  EXPECT_EQ(std::filesystem::file_size(path), 4u);
  std::filesystem::remove(path);
  EXPECT_THROW(write_text("/nonexistent/dir/x.csv", "x"), DataError);
}

// ---------------------------------------------------------------- sweep

struct SweepFixture {
  dsl::TaskSpec spec = test::bundled_spec("synthetic4.ptr");
  prompt::PromptSchema schema = prompt::compile(spec);
  SweepData data{corpus::generate_synthetic(spec, 40, 101, 0.0), corpus::generate_synthetic(spec, 40, 102, 0.0),
                 corpus::generate_synthetic(spec, 25, 103, 0.0)};
  mlm::ModelConfig model{16, 1, 2, 32, 40};
  trainer::TrainConfig train() const {
    trainer::TrainConfig cfg;
    cfg.learning_rate = 1e-2;
    cfg.epochs = 10;
    cfg.batch_size = 4;
    return cfg;
  }
};

TEST(Sweep, SingleSeedHasZeroStdAndRepeatedSeedsAgree) {
  const SweepFixture fx;
  trainer::FewShotConfig fs{{2, 4}, {13}};
  const auto row = sweep_fewshot(fx.schema, fx.data, fx.model, fs, fx.train());
  EXPECT_EQ(row.std, (std::vector<double>{0.0, 0.0}));
  EXPECT_EQ(row.method, "ptr");
  EXPECT_EQ(row.cells.size(), 2u);
  EXPECT_DOUBLE_EQ(row.overall_mean, (row.mean[0] + row.mean[1]) / 2);

  fs.seeds = {13, 13};
  std::vector<SweepCell> seen;
  const auto twice = sweep_fewshot(fx.schema, fx.data, fx.model, fs, fx.train(),
                                   [&](const SweepCell& c) { seen.push_back(c); });
  ASSERT_EQ(seen.size(), 4u);
  EXPECT_EQ(seen[0].f1, seen[1].f1);
  EXPECT_EQ(seen[2].f1, seen[3].f1);
  EXPECT_EQ(twice.mean, row.mean);
  EXPECT_EQ(twice.std, row.std);
}

TEST(Sweep, FailingCellsAreRecordedAndSkipped) {
  SweepFixture fx;
  fx.data.train_pool.instances[0].obj = {0, 999};  // K=40 draws every instance of its class
  trainer::FewShotConfig fs{{40}, {1}};
  const auto row = sweep_fewshot(fx.schema, fx.data, fx.model, fs, fx.train());
  ASSERT_EQ(row.cells.size(), 1u);
  ASSERT_TRUE(row.cells[0].error.has_value());
  EXPECT_TRUE(std::isnan(row.mean[0]));
  EXPECT_EQ(sweep_csv({row}), "method,K=40,Mean\nptr,,\n");
}

TEST(Sweep, MeanF1DoesNotDecreaseWithK) {
  const SweepFixture fx;
  const trainer::FewShotConfig fs{{8, 16, 32}, {13, 21, 42, 87, 100}};
  trainer::TrainConfig cfg;  // few-shot settings of the desk profile
  cfg.learning_rate = 1e-3;
  cfg.epochs = 30;
  cfg.batch_size = 4;
  const auto row = sweep_fewshot(fx.schema, fx.data, mlm::ModelConfig{32, 1, 2, 64, 40}, fs, cfg);
  for (const auto& c : row.cells) EXPECT_FALSE(c.error.has_value()) << *c.error;
  EXPECT_LE(row.mean[0], row.mean[1]);
  EXPECT_LE(row.mean[1], row.mean[2]);
}

}  // namespace
}  // namespace ptr::evalkit
