// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

// Composition of sub-prompts into one multi-mask task prompt, rendering of
// instances into model input, and the reversed-relation rewrite.

#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "ptr/instance.hpp"
#include "ptr/rule_dsl.hpp"

namespace ptr::prompt {

/// Which entity fills the subject placeholders. Classes whose rule is
/// reversed are scored on the kReversed rendering.
enum class Orientation { kForward, kReversed };

struct ClassVerbalizer {
  std::string label;
  std::vector<std::size_t> indices;  // phi_j(y): index into mask_vocabs[j]
  bool reversed = false;

  friend bool operator==(const ClassVerbalizer&, const ClassVerbalizer&) = default;
};

struct PromptSchema {
  std::vector<dsl::TemplateElement> elements;
  std::vector<std::vector<std::string>> mask_vocabs;  // V_j, first-seen order over rules
  std::vector<ClassVerbalizer> classes;               // spec class order
  std::optional<std::string> negative_class;
  std::vector<std::size_t> learnable_positions;  // indices into elements
  int learnable_count = 0;                       // 1 + largest [L#] index

  std::size_t n_masks() const { return mask_vocabs.size(); }
  std::vector<std::string> class_labels() const;
  std::optional<std::size_t> class_index(std::string_view label) const;
  bool uses(Orientation orientation) const;
  /// Phrases of class c, one per mask position.
  std::vector<std::string> phrases(std::size_t c) const;

  friend bool operator==(const PromptSchema&, const PromptSchema&) = default;
};

/// Concatenates sub-prompt templates in composition order. The input-text
/// placeholder is emitted once, at the front. When one sub-prompt ends with an
/// entity placeholder that the next sub-prompt also mentions, the trailing
/// occurrence is dropped so the entity appears once:
///   "the [MASK] <subj>" + "<subj> [MASK] <obj>" + "the [MASK] <obj>"
///   -> "<text> the [MASK] <subj> [MASK] the [MASK] <obj>"
/// Throws DataError when validate() reports errors.
PromptSchema compile(const dsl::TaskSpec& spec);

struct RenderedInput {
  std::vector<std::string> tokens;
  std::vector<std::size_t> mask_positions;
  std::vector<std::size_t> learnable_positions;
  Span subj;
  Span obj;
  Orientation orientation = Orientation::kForward;
};

/// x_prompt = T(x). Throws DataError on empty input, out-of-bounds or
/// overlapping spans.
RenderedInput render(const PromptSchema& schema, const Instance& instance,
                     Orientation orientation = Orientation::kForward);

/// Instance tokens alone, as consumed by the [CLS]-head baseline.
RenderedInput render_plain(const Instance& instance);

/// Space-joined tokens framed as "[CLS] ... [SEP]".
std::string to_display(const RenderedInput& input);

/// Toggles the reversed flag on each listed class: its subject/object role
/// bindings swap, phrases stay put. Applying the same subset twice restores
/// the task spec. Throws DataError for unknown classes or rules without a binary
/// conjunct.
dsl::TaskSpec reverse_relations(const dsl::TaskSpec& spec, const std::set<std::string>& subset);

void check_instance(const Instance& instance);

/// Canonical schema document; see docs/file_formats.md for field order.
nlohmann::ordered_json schema_to_json(const PromptSchema& schema);
PromptSchema schema_from_json(const nlohmann::ordered_json& doc);

/// Template line plus one verbalizer row per class.
std::string inspect(const PromptSchema& schema);

}  // namespace ptr::prompt
