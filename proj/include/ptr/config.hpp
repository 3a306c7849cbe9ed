// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

// Run profiles. Every default lives in a TOML profile (configs/desk.toml,
// configs/paper.toml, both compiled in); a user file overrides keys of the
// desk profile.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ptr/mlm/model.hpp"
#include "ptr/trainer.hpp"

namespace ptr::config {

struct SyntheticConfig {
  std::size_t n_per_class = 0;
  double noise_rate = 0.0;
  double distractor_rate = 0.0;

  friend bool operator==(const SyntheticConfig&, const SyntheticConfig&) = default;
};

struct RunConfig {
  mlm::ModelConfig model;
  trainer::TrainConfig train;
  trainer::FewShotConfig fewshot;
  // [fewshot] optimizer keys; unset ones fall back to [train].
  std::optional<double> fewshot_learning_rate;
  std::optional<int> fewshot_epochs;
  std::optional<int> fewshot_batch_size;
  SyntheticConfig synthetic;

  /// [train] with the [fewshot] overrides applied.
  trainer::TrainConfig fewshot_train() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Names of the compiled-in profiles: "desk", "paper".
std::vector<std::string> profile_names();

/// Throws UsageError for an unknown name.
RunConfig builtin_profile(std::string_view name);

/// TOML text of a compiled-in profile, byte-identical to configs/<name>.toml.
std::string_view builtin_profile_text(std::string_view name);

/// Parses TOML over `base`: keys present replace base values. Unknown tables
/// or keys and wrongly typed values throw DataError naming the key.
RunConfig parse_config(std::string_view toml_text, std::string_view source, const RunConfig& base);

/// parse_config of the file over the desk profile; IO errors throw DataError.
RunConfig load_config(const std::filesystem::path& path);

/// Resolved values, used by run manifests. from_json(to_json(c)) == c.
nlohmann::ordered_json to_json(const RunConfig& config);
RunConfig from_json(const nlohmann::ordered_json& doc);

}  // namespace ptr::config
