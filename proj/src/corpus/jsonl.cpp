// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "ptr/corpus.hpp"
#include "ptr/error.hpp"

namespace ptr::corpus {

namespace {

using json = nlohmann::json;

std::size_t index_field(const json& obj, const char* name, const std::string& where) {
  if (!obj.contains(name)) throw DataError(where + ": missing field '" + name + "'");
  const json& v = obj[name];
  if (!v.is_number_integer()) throw DataError(where + ": field '" + name + "' must be an integer");
  const auto n = v.get<std::int64_t>();
  if (n < 0) throw DataError(where + ": field '" + name + "' is negative");
  return static_cast<std::size_t>(n);
}

Span inclusive_span(const json& obj, const char* start, const char* end, const std::string& where) {
  const std::size_t b = index_field(obj, start, where);
  const std::size_t e = index_field(obj, end, where);
  if (e < b) throw DataError(where + ": " + end + " < " + start);
  return {b, e + 1};
}

}  // namespace

Dataset parse_jsonl(std::string_view text, std::string_view source) {
  Dataset ds;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(where + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object()) throw DataError(where + ": expected a JSON object");

    Instance inst;
    if (!obj.contains("id")) throw DataError(where + ": missing field 'id'");
    if (!obj.contains("token")) throw DataError(where + ": missing field 'token'");
    if (!obj.contains("relation")) throw DataError(where + ": missing field 'relation'");
    try {
      inst.id = obj["id"].is_string() ? obj["id"].get<std::string>() : obj["id"].dump();
      inst.tokens = obj["token"].get<std::vector<std::string>>();
      inst.label = obj["relation"].get<std::string>();
    } catch (const json::exception&) {
      throw DataError(where + ": 'token' must be an array of strings and 'relation' a string");
    }
    inst.subj = inclusive_span(obj, "subj_start", "subj_end", where);
    inst.obj = inclusive_span(obj, "obj_start", "obj_end", where);
    if (inst.tokens.empty()) throw DataError(where + ": empty input");
    if (inst.subj.end > inst.tokens.size() || inst.obj.end > inst.tokens.size()) {
      throw DataError(where + ": entity span out of bounds for " + std::to_string(inst.tokens.size()) +
                      " tokens");
    }
    if (inst.subj.overlaps(inst.obj)) throw DataError(where + ": overlapping entity spans");
    if (std::find(ds.classes.begin(), ds.classes.end(), inst.label) == ds.classes.end()) {
      ds.classes.push_back(inst.label);
    }
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

Dataset load_jsonl(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot read " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  Dataset ds = parse_jsonl(buf.str(), path.string());
  ds.split = path.stem().string();
  return ds;
}

std::string to_jsonl(const Dataset& dataset) {
  std::string out;
  for (const auto& inst : dataset.instances) {
    nlohmann::ordered_json obj;
    obj["id"] = inst.id;
    obj["token"] = inst.tokens;
    obj["subj_start"] = inst.subj.begin;
    obj["subj_end"] = inst.subj.end - 1;
    obj["obj_start"] = inst.obj.begin;
    obj["obj_end"] = inst.obj.end - 1;
    obj["relation"] = inst.label;
    out += obj.dump() + "\n";
  }
  return out;
}

void write_jsonl(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path.string());
  const std::string text = to_jsonl(dataset);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) throw DataError("cannot write " + path.string());
}

void check_labels(const Dataset& dataset, const std::vector<std::string>& classes) {
  for (const auto& inst : dataset.instances) {
    if (std::find(classes.begin(), classes.end(), inst.label) == classes.end()) {
      throw DataError("instance '" + inst.id + "' has label '" + inst.label + "' which the task spec does not declare");
    }
  }
}

}  // namespace ptr::corpus
