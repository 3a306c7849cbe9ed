// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

// TACRED-style JSONL ingestion and a seeded synthetic corpus generator.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ptr/instance.hpp"
#include "ptr/rule_dsl.hpp"

namespace ptr::corpus {

struct Dataset {
  std::string split;
  std::vector<std::string> classes;  // inventory; every instance label is listed here
  std::vector<Instance> instances;

  std::size_t size() const { return instances.size(); }
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// One JSON object per line with fields token (array of strings), subj_start,
/// subj_end, obj_start, obj_end (inclusive ends), relation and id. Unknown
/// fields are ignored; blank lines are skipped. The class inventory is the
/// first-seen label order. Errors name the source and line.
Dataset parse_jsonl(std::string_view text, std::string_view source = "<memory>");
Dataset load_jsonl(const std::filesystem::path& path);

/// Inverse of load_jsonl; ends are written inclusive, LF line endings.
std::string to_jsonl(const Dataset& dataset);
void write_jsonl(const Dataset& dataset, const std::filesystem::path& path);

/// Throws DataError naming the first instance whose label is not in classes.
void check_labels(const Dataset& dataset, const std::vector<std::string>& classes);

/// Surface frames use <subj>, <obj> and <cue> placeholders plus literal words.
/// <cue> expands to the class's binary-predicate phrase.
struct SurfaceOptions {
  std::map<std::string, std::vector<std::string>> frames;  // class -> frames
  double distractor_rate = 0.5;
};

/// Per class, in spec class order, emits n_per_class sentences:
///   1. frame: uniform over the class's frames (default "<subj> <cue> <obj> ."
///      and two paraphrases);
///   2. subject and object fillers: uniform over the lexicon of the type
///      phrase chosen by the class's unary predicate on that entity
///      ("entity" when none), object redrawn while equal to the subject;
///   3. with probability distractor_rate a distractor clause mentioning an
///      entity of a random type used in the task spec is prefixed or appended;
///   4. with probability noise_rate the label is replaced by a uniformly drawn
///      different class.
/// All draws come from one Rng(seed) in that order.
Dataset generate_synthetic(const dsl::TaskSpec& spec, std::size_t n_per_class, std::uint64_t seed,
                           double noise_rate, const SurfaceOptions& options = {});

/// Fillers for a type phrase. Known types (person, organization, city,
/// country, state, number, ...) use fixed word lists; any other type gets
/// pseudo-words derived from its name.
std::vector<std::vector<std::string>> lexicon(const std::string& type_phrase);

}  // namespace ptr::corpus
