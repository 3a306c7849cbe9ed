// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: compile, inspect, reverse, gen, init-model, train,
// eval and sweep, plus the run manifest that makes a train run repeatable.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ptr/config.hpp"

namespace ptr::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one command line (program name excluded). Errors are reported on err
/// and mapped to the exit codes above; nothing propagates.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);
/// Throws DataError when the file cannot be read.
std::string file_sha256(const std::filesystem::path& path);

struct InputFile {
  std::string path;  // as given on the command line
  std::string sha256;
  friend bool operator==(const InputFile&, const InputFile&) = default;
};

/// Everything a train run needs to be repeated bit for bit.
struct RunManifest {
  std::string tool_version;
  std::string command;         // "train"
  std::string created_utc;     // ISO 8601, informational
  std::string kernel_backend;  // backend the run used; a rerun selects it again
  std::uint64_t seed = 0;      // training seed; the model is initialized from derive_seed(seed, 2)
  config::RunConfig config;
  std::map<std::string, InputFile> inputs;  // role -> file: spec, train, dev, test
  std::map<std::string, std::string> outputs;  // file name in the run directory -> sha256
};

nlohmann::ordered_json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::ordered_json& doc);  // throws DataError

/// Seed precedence: PTR_SEED when set and non-empty, else --seed, else the
/// fallback.
/// Throws UsageError when PTR_SEED is not a non-negative integer.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t fallback);

}  // namespace ptr::cli
