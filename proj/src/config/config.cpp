// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptr/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "ptr/error.hpp"
#include "ptr_builtin_profiles.hpp"

namespace ptr::config {

namespace {

// Reads one [table], rejecting keys it does not know.
class Section {
 public:
  Section(const toml::table* table, std::string name, std::string source)
      : table_(table), name_(std::move(name)), source_(std::move(source)) {}

  template <typename T>
  void read(std::string_view key, std::optional<T>& out) {
    if (table_ && table_->get(key)) {
      T value{};
      read(key, value);
      out = value;
    } else {
      known_.insert(std::string(key));
    }
  }

  template <typename T>
  void read(std::string_view key, T& out) {
    known_.insert(std::string(key));
    if (!table_) return;
    const toml::node* node = table_->get(key);
    if (!node) return;
    if constexpr (std::is_same_v<T, bool>) {
      if (!node->is_boolean()) fail(key, "a boolean");
      out = node->as_boolean()->get();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!node->is_number()) fail(key, "a number");
      out = *node->value<double>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!node->is_integer()) fail(key, "an integer");
      const std::int64_t v = node->as_integer()->get();
      if constexpr (std::is_unsigned_v<T>) {
        if (v < 0) fail(key, "a non-negative integer");
      }
      out = static_cast<T>(v);
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!node->is_string()) fail(key, "a string");
      out = node->as_string()->get();
    } else {
      if (!node->is_array()) fail(key, "an array of integers");
      out.clear();
      for (const auto& item : *node->as_array()) {
        if (!item.is_integer() || item.as_integer()->get() < 0) fail(key, "an array of non-negative integers");
        out.push_back(static_cast<typename T::value_type>(item.as_integer()->get()));
      }
    }
  }

  void finish() const {
    if (!table_) return;
    for (const auto& [key, node] : *table_) {
      if (!known_.count(std::string(key.str()))) {
        throw DataError(source_ + ": unknown key '" + name_ + "." + std::string(key.str()) + "'");
      }
    }
  }

 private:
  [[noreturn]] void fail(std::string_view key, std::string_view expected) const {
    throw DataError(source_ + ": '" + name_ + "." + std::string(key) + "' must be " + std::string(expected));
  }

  const toml::table* table_;
  std::string name_;
  std::string source_;
  std::set<std::string> known_;
};

const toml::table* subtable(const toml::table& root, std::string_view name, const std::string& source) {
  const toml::node* node = root.get(name);
  if (!node) return nullptr;
  if (!node->is_table()) throw DataError(source + ": '" + std::string(name) + "' must be a table");
  return node->as_table();
}

void read_optimizer(Section& s, trainer::TrainConfig& t) {
  s.read("learning_rate", t.learning_rate);
  s.read("epochs", t.epochs);
  s.read("batch_size", t.batch_size);
}

template <typename T>
nlohmann::ordered_json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

template <typename T>
std::optional<T> optional_from_json(const nlohmann::ordered_json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

}  // namespace

trainer::TrainConfig RunConfig::fewshot_train() const {
  trainer::TrainConfig t = train;
  if (fewshot_learning_rate) t.learning_rate = *fewshot_learning_rate;
  if (fewshot_epochs) t.epochs = *fewshot_epochs;
  if (fewshot_batch_size) t.batch_size = *fewshot_batch_size;
  return t;
}

std::vector<std::string> profile_names() { return {"desk", "paper"}; }

std::string_view builtin_profile_text(std::string_view name) {
  if (name == "desk") return generated::kDeskToml;
  if (name == "paper") return generated::kPaperToml;
  throw UsageError("unknown profile '" + std::string(name) + "' (expected desk or paper)");
}

RunConfig builtin_profile(std::string_view name) {
  const std::string_view text = builtin_profile_text(name);
  return parse_config(text, std::string(name) + ".toml", RunConfig{});
}

RunConfig parse_config(std::string_view toml_text, std::string_view source, const RunConfig& base) {
  const std::string src(source);
  toml::table root;
  try {
    root = toml::parse(toml_text, src);
  } catch (const toml::parse_error& e) {
    const auto& where = e.source().begin;
    throw DataError(src + ":" + std::to_string(where.line) + ":" + std::to_string(where.column) + ": " +
                    std::string(e.description()));
  }
  for (const auto& [key, node] : root) {
    const std::string k(key.str());
    if (k != "model" && k != "train" && k != "fewshot" && k != "synthetic") {
      throw DataError(src + ": unknown table '" + k + "'");
    }
  }

  RunConfig c = base;
  Section model(subtable(root, "model", src), "model", src);
  model.read("d_model", c.model.d_model);
  model.read("n_layers", c.model.n_layers);
  model.read("n_heads", c.model.n_heads);
  model.read("d_ff", c.model.d_ff);
  model.read("max_len", c.model.max_len);
  model.read("init_std", c.model.init_std);
  model.read("layer_norm_eps", c.model.layer_norm_eps);
  model.read("map_unknown", c.model.map_unknown);
  model.finish();

  Section train(subtable(root, "train", src), "train", src);
  read_optimizer(train, c.train);
  train.read("warmup_fraction", c.train.warmup_fraction);
  train.read("weight_decay", c.train.weight_decay);
  train.read("seed", c.train.seed);
  std::string objective(mlm::objective_name(c.train.objective));
  train.read("objective", objective);
  try {
    c.train.objective = mlm::parse_objective(objective);
  } catch (const UsageError& e) {
    throw DataError(src + ": train.objective: " + e.what());
  }
  train.finish();

  Section fewshot(subtable(root, "fewshot", src), "fewshot", src);
  fewshot.read("ks", c.fewshot.ks);
  fewshot.read("seeds", c.fewshot.seeds);
  fewshot.read("learning_rate", c.fewshot_learning_rate);
  fewshot.read("epochs", c.fewshot_epochs);
  fewshot.read("batch_size", c.fewshot_batch_size);
  fewshot.finish();

  Section synthetic(subtable(root, "synthetic", src), "synthetic", src);
  synthetic.read("n_per_class", c.synthetic.n_per_class);
  synthetic.read("noise_rate", c.synthetic.noise_rate);
  synthetic.read("distractor_rate", c.synthetic.distractor_rate);
  synthetic.finish();

  try {
    c.model.check();
    c.train.check();
    c.fewshot.check();
    c.fewshot_train().check();
  } catch (const UsageError& e) {
    throw DataError(src + ": " + e.what());
  }
  if (!(c.synthetic.noise_rate >= 0.0 && c.synthetic.noise_rate < 1.0)) {
    throw DataError(src + ": synthetic.noise_rate must lie in [0, 1)");
  }
  if (!(c.synthetic.distractor_rate >= 0.0 && c.synthetic.distractor_rate <= 1.0)) {
    throw DataError(src + ": synthetic.distractor_rate must lie in [0, 1]");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string(), builtin_profile("desk"));
}

namespace {

nlohmann::ordered_json optimizer_json(const trainer::TrainConfig& t) {
  return {{"learning_rate", t.learning_rate},
          {"warmup_fraction", t.warmup_fraction},
          {"weight_decay", t.weight_decay},
          {"epochs", t.epochs},
          {"batch_size", t.batch_size},
          {"seed", t.seed},
          {"objective", mlm::objective_name(t.objective)}};
}

trainer::TrainConfig optimizer_from_json(const nlohmann::ordered_json& j) {
  trainer::TrainConfig t;
  t.learning_rate = j.at("learning_rate").get<double>();
  t.warmup_fraction = j.at("warmup_fraction").get<double>();
  t.weight_decay = j.at("weight_decay").get<double>();
  t.epochs = j.at("epochs").get<int>();
  t.batch_size = j.at("batch_size").get<int>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.objective = mlm::parse_objective(j.at("objective").get<std::string>());
  return t;
}

}  // namespace

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json doc;
  doc["model"] = {{"d_model", c.model.d_model},   {"n_layers", c.model.n_layers},
                  {"n_heads", c.model.n_heads},   {"d_ff", c.model.d_ff},
                  {"max_len", c.model.max_len},   {"init_std", c.model.init_std},
                  {"layer_norm_eps", c.model.layer_norm_eps}, {"map_unknown", c.model.map_unknown}};
  doc["train"] = optimizer_json(c.train);
  doc["fewshot"] = {{"ks", c.fewshot.ks},
                    {"seeds", c.fewshot.seeds},
                    {"learning_rate", optional_json(c.fewshot_learning_rate)},
                    {"epochs", optional_json(c.fewshot_epochs)},
                    {"batch_size", optional_json(c.fewshot_batch_size)}};
  doc["synthetic"] = {{"n_per_class", c.synthetic.n_per_class},
                      {"noise_rate", c.synthetic.noise_rate},
                      {"distractor_rate", c.synthetic.distractor_rate}};
  return doc;
}

RunConfig from_json(const nlohmann::ordered_json& doc) {
  try {
    RunConfig c;
    const auto& m = doc.at("model");
    c.model.d_model = m.at("d_model").get<int>();
    c.model.n_layers = m.at("n_layers").get<int>();
    c.model.n_heads = m.at("n_heads").get<int>();
    c.model.d_ff = m.at("d_ff").get<int>();
    c.model.max_len = m.at("max_len").get<int>();
    c.model.init_std = m.at("init_std").get<double>();
    c.model.layer_norm_eps = m.at("layer_norm_eps").get<double>();
    c.model.map_unknown = m.at("map_unknown").get<bool>();
    c.train = optimizer_from_json(doc.at("train"));
    const auto& f = doc.at("fewshot");
    c.fewshot.ks = f.at("ks").get<std::vector<int>>();
    c.fewshot.seeds = f.at("seeds").get<std::vector<std::uint64_t>>();
    c.fewshot_learning_rate = optional_from_json<double>(f.at("learning_rate"));
    c.fewshot_epochs = optional_from_json<int>(f.at("epochs"));
    c.fewshot_batch_size = optional_from_json<int>(f.at("batch_size"));
    const auto& s = doc.at("synthetic");
    c.synthetic.n_per_class = s.at("n_per_class").get<std::size_t>();
    c.synthetic.noise_rate = s.at("noise_rate").get<double>();
    c.synthetic.distractor_rate = s.at("distractor_rate").get<double>();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed config document: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("malformed config document: ") + e.what());
  }
}

}  // namespace ptr::config
