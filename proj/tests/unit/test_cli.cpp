// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ptr/cli.hpp"
#include "ptr/corpus.hpp"
#include "ptr/error.hpp"
#include "ptr/prompt.hpp"
#include "test_util.hpp"

namespace ptr::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result ptr_cmd(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

// Fresh scratch directory per test; PTR_SEED cleared so tests see flags only.
class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv("PTR_SEED");
    dir_ = fs::temp_directory_path() /
           ("ptr_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override {
    unsetenv("PTR_SEED");
    fs::remove_all(dir_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string spec() const { return test::source_path("specs/synthetic4.ptr").string(); }

  // Small model and short schedule so a train run takes well under a second.
  std::string small_config() const {
    spit(path("small.toml"), "[model]\nd_model = 16\nn_layers = 1\nn_heads = 2\nd_ff = 32\n[train]\nepochs = 2\n");
    return path("small.toml");
  }
  void make_data() const {
    for (auto [name, seed] : {std::pair{"train.jsonl", 1}, {"dev.jsonl", 2}, {"test.jsonl", 3}}) {
      ASSERT_EQ(ptr_cmd({"gen", "--spec", spec(), "--n", "8", "--seed", std::to_string(seed), "--out", path(name)}).code,
                kExitOk);
    }
  }
  std::vector<std::string> train_args(const std::string& out) const {
    return {"train", "--config", small_config(), "--spec", spec(), "--data", path("train.jsonl"), "--dev",
            path("dev.jsonl"), "--test", path("test.jsonl"), "--seed", "5", "--out", out};
  }

  fs::path dir_;
};

TEST(Digest, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_THROW(file_sha256("/nonexistent/file"), DataError);
}

TEST_F(Cli, UsageErrorsExitWithOne) {
  EXPECT_EQ(ptr_cmd({}).code, kExitUsage);
  EXPECT_EQ(ptr_cmd({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(ptr_cmd({"compile"}).code, kExitUsage);
  EXPECT_EQ(ptr_cmd({"compile", spec(), "--bogus"}).code, kExitUsage);
  EXPECT_EQ(ptr_cmd({"train", "--spec", spec(), "--data", "x.jsonl"}).code, kExitUsage);  // no --out
  EXPECT_EQ(ptr_cmd({"train", "--out", path("run")}).code, kExitUsage);                    // no --spec/--data
  EXPECT_EQ(ptr_cmd({"reverse", spec()}).code, kExitUsage);                                // no subset
  EXPECT_EQ(ptr_cmd({"gen", "--spec", spec(), "--profile", "laptop", "--out", path("x")}).code, kExitUsage);
  EXPECT_EQ(ptr_cmd({"--version"}).code, kExitOk);
}

TEST_F(Cli, DataErrorsExitWithTwo) {
  const auto r = ptr_cmd({"compile", "/nonexistent/spec.ptr"});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("/nonexistent/spec.ptr"), std::string::npos);
  spit(path("bad.ptr"), "classes { a; }\n");
  const auto bad = ptr_cmd({"compile", path("bad.ptr")});
  EXPECT_EQ(bad.code, kExitData);
  EXPECT_NE(bad.err.find("1:"), std::string::npos);
  spit(path("bad.jsonl"), "{\"id\": 1\n");
  EXPECT_EQ(ptr_cmd({"train", "--spec", spec(), "--data", path("bad.jsonl"), "--out", path("run")}).code, kExitData);
  EXPECT_EQ(ptr_cmd({"reverse", spec(), "--classes", "nope"}).code, kExitData);
}

TEST_F(Cli, CompileEmitsTheCanonicalSchema) {
  const auto r = ptr_cmd({"compile", spec()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto expected = prompt::schema_to_json(prompt::compile(test::bundled_spec("synthetic4.ptr")));
  EXPECT_EQ(nlohmann::ordered_json::parse(r.out), expected);
  EXPECT_NE(r.err.find("phrase-multiple-positions"), std::string::npos);  // warnings go to stderr
  ASSERT_EQ(ptr_cmd({"compile", spec(), "--out", path("s.json")}).code, kExitOk);
  EXPECT_EQ(slurp(path("s.json")), r.out);
  const auto shown = ptr_cmd({"inspect", path("s.json")});
  EXPECT_EQ(shown.code, kExitOk);
  EXPECT_NE(shown.out.find("template: <text> the [MASK]_1 <subj> [MASK]_2 the [MASK]_3 <obj>"), std::string::npos);
  EXPECT_EQ(ptr_cmd({"inspect", spec()}).out, shown.out);
}

TEST_F(Cli, ReverseRendersTheRewrittenSpec) {
  const auto r = ptr_cmd({"reverse", spec(), "--classes", "org:parents"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto reversed = dsl::parse_task_spec(r.out);
  EXPECT_EQ(reversed, prompt::reverse_relations(test::bundled_spec("synthetic4.ptr"), {"org:parents"}));
}

TEST_F(Cli, GenIsSeededAndPtrSeedWins) {
  ASSERT_EQ(ptr_cmd({"gen", "--spec", spec(), "--n", "3", "--seed", "9", "--out", path("a.jsonl")}).code, kExitOk);
  const auto direct = corpus::to_jsonl(corpus::generate_synthetic(test::bundled_spec("synthetic4.ptr"), 3, 9, 0.0));
  EXPECT_EQ(slurp(path("a.jsonl")), direct);
  setenv("PTR_SEED", "9", 1);
  ASSERT_EQ(ptr_cmd({"gen", "--spec", spec(), "--n", "3", "--seed", "1", "--out", path("b.jsonl")}).code, kExitOk);
  EXPECT_EQ(slurp(path("b.jsonl")), direct);
  setenv("PTR_SEED", "-4", 1);
  EXPECT_EQ(ptr_cmd({"gen", "--spec", spec(), "--n", "3", "--out", path("c.jsonl")}).code, kExitUsage);
}

TEST_F(Cli, ResolveSeedPrecedence) {
  EXPECT_EQ(resolve_seed(std::nullopt, 7), 7u);
  EXPECT_EQ(resolve_seed(3, 7), 3u);
  setenv("PTR_SEED", "18446744073709551615", 1);
  EXPECT_EQ(resolve_seed(3, 7), 18446744073709551615ull);
  setenv("PTR_SEED", "", 1);  // empty counts as unset
  EXPECT_EQ(resolve_seed(3, 7), 3u);
  for (const char* bad : {"12x", "-1", "18446744073709551616", " 5"}) {
    setenv("PTR_SEED", bad, 1);
    EXPECT_THROW(resolve_seed(3, 7), UsageError) << "'" << bad << "'";
  }
}

TEST_F(Cli, TrainWritesARunDirectoryAndTheManifestRepeatsIt) {
  make_data();
  const auto r = ptr_cmd(train_args(path("run1")));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* f : {"model.ckpt", "history.csv", "epochs.csv", "predictions.tsv", "report.json", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(path("run1") + "/" + f)) << f;
  }
  EXPECT_EQ(slurp(path("run1/history.csv")).rfind("step,lr,loss\n", 0), 0u);

  const auto manifest = manifest_from_json(nlohmann::ordered_json::parse(slurp(path("run1/manifest.json"))));
  EXPECT_EQ(manifest.command, "train");
  EXPECT_EQ(manifest.seed, 5u);
  EXPECT_EQ(manifest.config.train.epochs, 2);
  EXPECT_EQ(manifest.inputs.at("train").sha256, file_sha256(path("train.jsonl")));
  EXPECT_EQ(manifest.outputs.at("model.ckpt"), file_sha256(path("run1/model.ckpt")));
  EXPECT_EQ(manifest_from_json(manifest_to_json(manifest)).outputs, manifest.outputs);

  const auto again = ptr_cmd({"train", "--manifest", path("run1/manifest.json"), "--out", path("run2")});
  ASSERT_EQ(again.code, kExitOk) << again.err;
  for (const char* f : {"model.ckpt", "history.csv", "epochs.csv", "predictions.tsv", "report.json"}) {
    EXPECT_EQ(slurp(path("run1") + "/" + f), slurp(path("run2") + "/" + f)) << f;
  }

  // A changed input no longer matches the recorded digest.
  spit(path("dev.jsonl"), slurp(path("test.jsonl")));
  EXPECT_EQ(ptr_cmd({"train", "--manifest", path("run1/manifest.json"), "--out", path("run3")}).code, kExitData);
}

TEST_F(Cli, EvalReportsAndPredictions) {
  make_data();
  ASSERT_EQ(ptr_cmd(train_args(path("run"))).code, kExitOk);
  const auto json = ptr_cmd({"eval", "--model", path("run/model.ckpt"), "--data", path("test.jsonl")});
  ASSERT_EQ(json.code, kExitOk) << json.err;
  const auto doc = nlohmann::ordered_json::parse(json.out);
  EXPECT_EQ(doc["n_instances"], 32);
  EXPECT_EQ(doc, nlohmann::ordered_json::parse(slurp(path("run/report.json"))));
  const auto csv = ptr_cmd({"eval", "--model", path("run/model.ckpt"), "--data", path("test.jsonl"), "--report",
                            "csv", "--predictions", path("p.tsv")});
  ASSERT_EQ(csv.code, kExitOk) << csv.err;
  EXPECT_EQ(csv.out.rfind("class,P,R,F1,TP,FP,FN\n", 0), 0u);
  EXPECT_EQ(slurp(path("p.tsv")), slurp(path("run/predictions.tsv")));
  EXPECT_EQ(ptr_cmd({"eval", "--model", path("run/model.ckpt"), "--data", path("test.jsonl"), "--report", "xml"}).code,
            kExitUsage);
  const auto shown = ptr_cmd({"inspect", path("run/model.ckpt")});
  EXPECT_EQ(shown.code, kExitOk);
  EXPECT_NE(shown.out.find("d_model"), std::string::npos);
}

TEST_F(Cli, NonFiniteTrainingExitsWithThree) {
  make_data();
  spit(path("huge.toml"), "[model]\nd_model = 16\nn_layers = 1\nn_heads = 2\nd_ff = 32\n[train]\nepochs = 3\n"
                          "learning_rate = 1e300\nwarmup_fraction = 0.0\n");
  const auto r = ptr_cmd({"train", "--config", path("huge.toml"), "--spec", spec(), "--data", path("train.jsonl"),
                          "--out", path("run")});
  EXPECT_EQ(r.code, kExitNumeric) << r.err;
}

TEST_F(Cli, SweepWritesMeanStdAndCells) {
  make_data();
  spit(path("fs.toml"), "[model]\nd_model = 16\nn_layers = 1\nn_heads = 2\nd_ff = 32\n[fewshot]\nepochs = 2\n");
  const auto r = ptr_cmd({"sweep", "--config", path("fs.toml"), "--spec", spec(), "--train-pool", path("train.jsonl"),
                          "--dev-pool", path("dev.jsonl"), "--test", path("test.jsonl"), "--fewshot", "1,2",
                          "--seeds", "13,21", "--out", path("sweep.csv"), "--cells", path("cells.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string mean = slurp(path("sweep.csv"));
  EXPECT_EQ(mean.rfind("method,K=1,K=2,Mean\nptr,", 0), 0u);
  EXPECT_NE(mean.find("\ncls-baseline,"), std::string::npos);
  EXPECT_EQ(slurp(path("sweep_std.csv")).rfind("method,K=1,K=2,Mean\n", 0), 0u);
  std::istringstream cells(slurp(path("cells.csv")));
  int lines = 0;
  for (std::string line; std::getline(cells, line);) ++lines;
  EXPECT_EQ(lines, 1 + 2 * 2 * 2);  // header + methods x K x seeds
}

}  // namespace
}  // namespace ptr::cli
