// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptr/mlm/vocab.hpp"

#include <algorithm>
#include <charconv>

#include "ptr/error.hpp"

namespace ptr::mlm {

namespace {
constexpr const char* kReservedNames[] = {"[PAD]", "[CLS]", "[SEP]", "[MASK]", "[UNK]"};
}  // namespace

Vocab::Vocab() {
  for (const char* name : kReservedNames) add(Kind::kReserved, name);
}

void Vocab::add(Kind kind, std::string text) {
  const auto id = static_cast<TokenId>(entries_.size());
  if (kind == Kind::kWord) words_.emplace(text, id);
  if (kind == Kind::kLabel) labels_.emplace(text, id);
  entries_.push_back({kind, std::move(text)});
}

Vocab Vocab::build(int learnable_count, const std::vector<std::string>& label_phrases,
                   std::vector<std::string> words) {
  Vocab v;
  v.learnable_count_ = learnable_count;
  for (int i = 0; i < learnable_count; ++i) v.add(Kind::kLearnable, "[L" + std::to_string(i) + "]");
  for (const auto& phrase : label_phrases) {
    if (!v.labels_.count(phrase)) v.add(Kind::kLabel, phrase);
  }
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  for (auto& w : words) {
    if (w.empty()) continue;
    const bool reserved_form = w == "[MASK]" || w == "[CLS]" || w == "[SEP]" || w == "[PAD]" ||
                               w == "[UNK]" || (w.size() > 3 && w.rfind("[L", 0) == 0 && w.back() == ']');
    if (reserved_form) continue;
    v.add(Kind::kWord, std::move(w));
  }
  return v;
}

int Vocab::learnable_index(TokenId id) const {
  const int idx = id - kFirstLearnableId;
  return idx >= 0 && idx < learnable_count_ ? idx : -1;
}

std::optional<TokenId> Vocab::find_word(std::string_view word) const {
  auto it = words_.find(std::string(word));
  if (it == words_.end()) return std::nullopt;
  return it->second;
}

std::optional<TokenId> Vocab::find_label(std::string_view phrase) const {
  auto it = labels_.find(std::string(phrase));
  if (it == labels_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocab::label_id(std::string_view phrase) const {
  if (auto id = find_label(phrase)) return *id;
  throw DataError("label phrase \"" + std::string(phrase) + "\" is not in the vocabulary");
}

TokenId Vocab::token_id(std::string_view token, bool map_unknown) const {
  if (token == "[MASK]") return kMaskId;
  if (token == "[CLS]") return kClsId;
  if (token == "[SEP]") return kSepId;
  if (token == "[PAD]") return kPadId;
  if (token.size() > 3 && token.substr(0, 2) == "[L" && token.back() == ']') {
    int idx = -1;
    auto [p, ec] = std::from_chars(token.data() + 2, token.data() + token.size() - 1, idx);
    if (ec == std::errc() && p == token.data() + token.size() - 1) {
      if (idx >= 0 && idx < learnable_count_) return kFirstLearnableId + idx;
      throw DataError("learnable token " + std::string(token) + " exceeds the model's " +
                      std::to_string(learnable_count_) + " prompt tokens");
    }
  }
  if (auto id = find_word(token)) return *id;
  if (map_unknown) return kUnkId;
  throw DataError("out-of-vocabulary token '" + std::string(token) + "'");
}

nlohmann::ordered_json Vocab::to_json() const {
  nlohmann::ordered_json doc;
  doc["learnable_count"] = learnable_count_;
  nlohmann::ordered_json labels = nlohmann::ordered_json::array();
  nlohmann::ordered_json words = nlohmann::ordered_json::array();
  for (const auto& e : entries_) {
    if (e.kind == Kind::kLabel) labels.push_back(e.text);
    if (e.kind == Kind::kWord) words.push_back(e.text);
  }
  doc["labels"] = labels;
  doc["words"] = words;
  return doc;
}

Vocab Vocab::from_json(const nlohmann::ordered_json& doc) {
  try {
    Vocab v = build(doc.at("learnable_count").get<int>(),
                    doc.at("labels").get<std::vector<std::string>>(),
                    doc.at("words").get<std::vector<std::string>>());
    if (v.size() != kFirstLearnableId + static_cast<std::size_t>(v.learnable_count_) +
                        doc.at("labels").size() + doc.at("words").size()) {
      throw DataError("vocabulary document has duplicate entries");
    }
    return v;
  } catch (const nlohmann::ordered_json::exception& e) {
    throw DataError(std::string("malformed vocabulary: ") + e.what());
  }
}

}  // namespace ptr::mlm
