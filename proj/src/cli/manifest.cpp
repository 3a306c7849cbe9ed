// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "ptr/cli.hpp"
#include "ptr/error.hpp"

namespace ptr::cli {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw DataError("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string file_sha256(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream bytes;
  bytes << in.rdbuf();
  return sha256_hex(bytes.str());
}

nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json doc;
  doc["tool"] = "ptr";
  doc["tool_version"] = m.tool_version;
  doc["command"] = m.command;
  doc["created_utc"] = m.created_utc;
  doc["kernel_backend"] = m.kernel_backend;
  doc["seed"] = m.seed;
  doc["config"] = config::to_json(m.config);
  auto inputs = nlohmann::ordered_json::object();
  for (const auto& [role, file] : m.inputs) inputs[role] = {{"path", file.path}, {"sha256", file.sha256}};
  doc["inputs"] = inputs;
  auto outputs = nlohmann::ordered_json::object();
  for (const auto& [name, digest] : m.outputs) outputs[name] = {{"sha256", digest}};
  doc["outputs"] = outputs;
  return doc;
}

RunManifest manifest_from_json(const nlohmann::ordered_json& doc) {
  try {
    if (doc.at("tool").get<std::string>() != "ptr") throw DataError("manifest was not written by ptr");
    RunManifest m;
    m.tool_version = doc.at("tool_version").get<std::string>();
    m.command = doc.at("command").get<std::string>();
    m.created_utc = doc.at("created_utc").get<std::string>();
    m.kernel_backend = doc.at("kernel_backend").get<std::string>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.config = config::from_json(doc.at("config"));
    for (const auto& [role, file] : doc.at("inputs").items()) {
      m.inputs[role] = {file.at("path").get<std::string>(), file.at("sha256").get<std::string>()};
    }
    for (const auto& [name, entry] : doc.at("outputs").items()) m.outputs[name] = entry.at("sha256").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::uint64_t fallback) {
  if (const char* env = std::getenv("PTR_SEED"); env && *env) {
    const std::string text(env);
    if (text.find_first_not_of("0123456789") != std::string::npos || text.size() > 20) {
      throw UsageError("PTR_SEED must be a non-negative integer, got '" + text + "'");
    }
    try {
      return std::stoull(text);
    } catch (const std::exception&) {
      throw UsageError("PTR_SEED is out of range: '" + text + "'");
    }
  }
  return flag.value_or(fallback);
}

}  // namespace ptr::cli
