// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

// Checkpoint layout, all integers little-endian:
//   "PTRMODEL"  8 bytes
//   version     u32
//   header_len  u64
//   header      JSON text (config, vocab, classes, objective, schema, tensor table)
//   tensors     f64 values in tensor-table order

#include <bit>
#include <cstring>
#include <fstream>

#include "ptr/error.hpp"
#include "ptr/mlm/model.hpp"

namespace ptr::mlm {

namespace {

constexpr char kMagic[8] = {'P', 'T', 'R', 'M', 'O', 'D', 'E', 'L'};
constexpr std::uint32_t kVersion = 1;
using json = nlohmann::ordered_json;

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_uint(const std::string& in, std::size_t& pos, int bytes) {
  if (pos + static_cast<std::size_t>(bytes) > in.size()) throw DataError("checkpoint: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + static_cast<std::size_t>(i)]))
         << (8 * i);
  }
  pos += static_cast<std::size_t>(bytes);
  return v;
}

json config_to_json(const ModelConfig& c) {
  return {{"d_model", c.d_model},   {"n_layers", c.n_layers},
          {"n_heads", c.n_heads},   {"d_ff", c.d_ff},
          {"max_len", c.max_len},   {"init_std", c.init_std},
          {"layer_norm_eps", c.layer_norm_eps}, {"map_unknown", c.map_unknown}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.d_model = j.at("d_model").get<int>();
  c.n_layers = j.at("n_layers").get<int>();
  c.n_heads = j.at("n_heads").get<int>();
  c.d_ff = j.at("d_ff").get<int>();
  c.max_len = j.at("max_len").get<int>();
  c.init_std = j.at("init_std").get<double>();
  c.layer_norm_eps = j.at("layer_norm_eps").get<double>();
  c.map_unknown = j.at("map_unknown").get<bool>();
  return c;
}

}  // namespace

void TinyMLM::save(const std::filesystem::path& path, Objective objective,
                   const prompt::PromptSchema* schema) const {
  json header;
  header["objective"] = objective_name(objective);
  header["config"] = config_to_json(config_);
  header["vocab"] = vocab_.to_json();
  header["classes"] = class_labels_;
  header["schema"] = schema ? prompt::schema_to_json(*schema) : json(nullptr);
  json table = json::array();
  params_.visit([&](const std::string& name, const Matrix& m) {
    table.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});
  });
  header["tensors"] = table;
  const std::string text = header.dump();

  std::string out(kMagic, sizeof kMagic);
  put_u32(out, kVersion);
  put_u64(out, text.size());
  out += text;
  params_.visit([&](const std::string&, const Matrix& m) {
    for (double v : m.values()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  });

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write checkpoint " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError("cannot write checkpoint " + path.string());
}

TinyMLM::Loaded TinyMLM::load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot read checkpoint " + path.string());
  const std::string in((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const std::string where = "checkpoint " + path.string() + ": ";
  if (in.size() < sizeof kMagic || std::memcmp(in.data(), kMagic, sizeof kMagic) != 0) {
    throw DataError(where + "bad magic");
  }
  std::size_t pos = sizeof kMagic;
  const auto version = get_uint(in, pos, 4);
  if (version != kVersion) throw DataError(where + "unsupported version " + std::to_string(version));
  const auto header_len = get_uint(in, pos, 8);
  if (pos + header_len > in.size()) throw DataError(where + "truncated header");
  try {
    const json header = json::parse(in.substr(pos, header_len));
    pos += header_len;
    TinyMLM model(config_from_json(header.at("config")), Vocab::from_json(header.at("vocab")),
                  header.at("classes").get<std::vector<std::string>>());
    const json& table = header.at("tensors");
    std::size_t index = 0;
    model.params_.visit([&](const std::string& name, Matrix& m) {
      if (index >= table.size()) throw DataError(where + "tensor table too short");
      const json& t = table[index++];
      if (t.at("name").get<std::string>() != name || t.at("rows").get<std::size_t>() != m.rows() ||
          t.at("cols").get<std::size_t>() != m.cols()) {
        throw DataError(where + "tensor '" + name + "' does not match the configuration");
      }
      for (double& v : m.values()) v = std::bit_cast<double>(get_uint(in, pos, 8));
    });
    if (index != table.size() || pos != in.size()) throw DataError(where + "trailing data");
    std::optional<prompt::PromptSchema> schema;
    if (!header.at("schema").is_null()) schema = prompt::schema_from_json(header.at("schema"));
    return Loaded{std::move(model), parse_objective(header.at("objective").get<std::string>()),
                  std::move(schema)};
  } catch (const json::exception& e) {
    throw DataError(where + "malformed header: " + e.what());
  } catch (const UsageError& e) {
    throw DataError(where + e.what());
  }
}

}  // namespace ptr::mlm
