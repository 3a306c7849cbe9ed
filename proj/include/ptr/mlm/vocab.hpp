// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace ptr::mlm {

using TokenId = std::int32_t;

// Reserved ids are fixed across every vocabulary.
inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kClsId = 1;
inline constexpr TokenId kSepId = 2;
inline constexpr TokenId kMaskId = 3;
inline constexpr TokenId kUnkId = 4;
inline constexpr TokenId kFirstLearnableId = 5;

/// Closed vocabulary. Id layout: reserved tokens, then learnable prompt tokens
/// [L0]..[Lk-1], then label phrases (atomic, one row each), then surface words
/// in sorted order. Label phrases live in their own namespace, so the phrase
/// "person" and the surface word "person" are different entries.
class Vocab {
 public:
  enum class Kind { kReserved, kLearnable, kLabel, kWord };
  struct Entry {
    Kind kind;
    std::string text;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  Vocab();

  /// Phrases keep first-seen order; words are de-duplicated and sorted.
  static Vocab build(int learnable_count, const std::vector<std::string>& label_phrases,
                     std::vector<std::string> words);

  std::size_t size() const { return entries_.size(); }
  const Entry& entry(TokenId id) const { return entries_.at(static_cast<std::size_t>(id)); }
  int learnable_count() const { return learnable_count_; }

  /// -1 unless id is a learnable prompt token.
  int learnable_index(TokenId id) const;

  std::optional<TokenId> find_word(std::string_view word) const;
  std::optional<TokenId> find_label(std::string_view phrase) const;
  TokenId label_id(std::string_view phrase) const;  // throws DataError

  /// Maps a rendered surface token ("[MASK]", "[L2]", or a word) to its id.
  /// Unknown words throw DataError unless map_unknown, which yields [UNK].
  TokenId token_id(std::string_view token, bool map_unknown = false) const;

  nlohmann::ordered_json to_json() const;
  static Vocab from_json(const nlohmann::ordered_json& doc);

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.entries_ == b.entries_ && a.learnable_count_ == b.learnable_count_;
  }

 private:
  void add(Kind kind, std::string text);

  std::vector<Entry> entries_;
  std::unordered_map<std::string, TokenId> words_;
  std::unordered_map<std::string, TokenId> labels_;
  int learnable_count_ = 0;
};

}  // namespace ptr::mlm
