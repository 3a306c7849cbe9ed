// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>

#include "ptr/error.hpp"
#include "ptr/prompt.hpp"

namespace ptr::prompt {

using dsl::TemplateElement;
using Kind = dsl::TemplateElement::Kind;
using json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

// Literal words that could be mistaken for placeholders get a leading backslash.
std::string element_token(const TemplateElement& e) {
  if (e.kind != Kind::kLiteral) return dsl::to_string(e);
  if (!e.word.empty() && (e.word.front() == '<' || e.word.front() == '[' || e.word.front() == '\\')) {
    return "\\" + e.word;
  }
  return e.word;
}

TemplateElement parse_element(const std::string& tok) {
  if (tok == "<text>") return TemplateElement::input();
  if (tok == "<subj>") return TemplateElement::entity(dsl::Role::kSubject);
  if (tok == "<obj>") return TemplateElement::entity(dsl::Role::kObject);
  if (tok == "[MASK]") return TemplateElement::mask();
  if (!tok.empty() && tok.front() == '\\') return TemplateElement::literal(tok.substr(1));
  if (tok.size() > 3 && tok.rfind("[L", 0) == 0 && tok.back() == ']') {
    int index = -1;
    const char* first = tok.data() + 2;
    const char* last = tok.data() + tok.size() - 1;
    auto [ptr, ec] = std::from_chars(first, last, index);
    if (ec == std::errc() && ptr == last && index >= 0) return TemplateElement::learnable(index);
  }
  if (!tok.empty() && (tok.front() == '<' || tok.front() == '[')) {
    throw DataError("schema: unknown template placeholder '" + tok + "'");
  }
  return TemplateElement::literal(tok);
}

}  // namespace

json schema_to_json(const PromptSchema& schema) {
  json doc;
  doc["format"] = "ptr-schema";
  doc["version"] = kSchemaVersion;
  json tmpl = json::array();
  for (const auto& e : schema.elements) tmpl.push_back(element_token(e));
  doc["template"] = tmpl;
  doc["n_masks"] = schema.n_masks();
  doc["mask_vocabs"] = schema.mask_vocabs;
  json classes = json::array();
  for (std::size_t c = 0; c < schema.classes.size(); ++c) {
    const auto& cv = schema.classes[c];
    json entry;
    entry["label"] = cv.label;
    entry["verbalizer"] = cv.indices;
    entry["phrases"] = schema.phrases(c);
    entry["reversed"] = cv.reversed;
    classes.push_back(std::move(entry));
  }
  doc["classes"] = classes;
  doc["negative_class"] = schema.negative_class ? json(*schema.negative_class) : json(nullptr);
  doc["learnable_tokens"] = {{"count", schema.learnable_count},
                             {"positions", schema.learnable_positions}};
  return doc;
}

PromptSchema schema_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != "ptr-schema") {
      throw DataError("schema: not a ptr-schema document");
    }
    if (doc.at("version").get<int>() != kSchemaVersion) {
      throw DataError("schema: unsupported version " + doc.at("version").dump());
    }
    PromptSchema schema;
    for (const auto& tok : doc.at("template")) schema.elements.push_back(parse_element(tok.get<std::string>()));
    schema.mask_vocabs = doc.at("mask_vocabs").get<std::vector<std::vector<std::string>>>();
    if (doc.at("n_masks").get<std::size_t>() != schema.mask_vocabs.size()) {
      throw DataError("schema: n_masks disagrees with mask_vocabs");
    }
    for (const auto& entry : doc.at("classes")) {
      ClassVerbalizer cv;
      cv.label = entry.at("label").get<std::string>();
      cv.indices = entry.at("verbalizer").get<std::vector<std::size_t>>();
      cv.reversed = entry.at("reversed").get<bool>();
      if (cv.indices.size() != schema.n_masks()) {
        throw DataError("schema: verbalizer of '" + cv.label + "' has wrong length");
      }
      for (std::size_t j = 0; j < cv.indices.size(); ++j) {
        if (cv.indices[j] >= schema.mask_vocabs[j].size()) {
          throw DataError("schema: verbalizer of '" + cv.label + "' indexes outside V_" +
                          std::to_string(j + 1));
        }
      }
      schema.classes.push_back(std::move(cv));
    }
    if (!doc.at("negative_class").is_null()) {
      schema.negative_class = doc.at("negative_class").get<std::string>();
    }
    schema.learnable_count = doc.at("learnable_tokens").at("count").get<int>();
    schema.learnable_positions =
        doc.at("learnable_tokens").at("positions").get<std::vector<std::size_t>>();
    return schema;
  } catch (const json::exception& e) {
    throw DataError(std::string("schema: malformed document: ") + e.what());
  }
}

std::string inspect(const PromptSchema& schema) {
  std::string line = "template:";
  std::size_t mask = 0;
  for (const auto& e : schema.elements) {
    line += " " + dsl::to_string(e);
    if (e.kind == Kind::kMask) line += "_" + std::to_string(++mask);
  }
  std::string out = line + "\n\n";

  std::vector<std::string> header{"Class Label"};
  for (std::size_t j = 0; j < schema.n_masks(); ++j) header.push_back("[MASK]_" + std::to_string(j + 1));
  std::vector<std::vector<std::string>> rows{header};
  for (std::size_t c = 0; c < schema.classes.size(); ++c) {
    std::vector<std::string> row{schema.classes[c].label + (schema.classes[c].reversed ? " (reversed)" : "")};
    for (auto& p : schema.phrases(c)) row.push_back(p);
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  auto emit = [&](const std::vector<std::string>& row) {
    std::string s;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) s += " | ";
      s += row[i];
      if (i + 1 < row.size()) s += std::string(width[i] - row[i].size(), ' ');
    }
    out += s + "\n";
  };
  emit(rows.front());
  std::string rule;
  for (std::size_t i = 0; i < width.size(); ++i) {
    if (i) rule += "-+-";
    rule += std::string(width[i], '-');
  }
  out += rule + "\n";
  for (std::size_t r = 1; r < rows.size(); ++r) emit(rows[r]);
  return out;
}

}  // namespace ptr::prompt
