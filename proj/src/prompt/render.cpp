// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include "ptr/error.hpp"
#include "ptr/prompt.hpp"

namespace ptr::prompt {

using Kind = dsl::TemplateElement::Kind;

void check_instance(const Instance& instance) {
  const std::string who = instance.id.empty() ? "instance" : "instance '" + instance.id + "'";
  if (instance.tokens.empty()) throw DataError(who + ": empty input");
  const std::size_t n = instance.tokens.size();
  for (const auto& [name, span] : {std::pair{"subject", instance.subj}, std::pair{"object", instance.obj}}) {
    if (span.empty()) throw DataError(who + ": empty " + name + " span");
    if (span.end > n) {
      throw DataError(who + ": " + name + " span [" + std::to_string(span.begin) + ", " +
                      std::to_string(span.end) + ") out of bounds for " + std::to_string(n) +
                      " tokens");
    }
  }
  if (instance.subj.overlaps(instance.obj)) throw DataError(who + ": overlapping entity spans");
}

RenderedInput render(const PromptSchema& schema, const Instance& instance, Orientation orientation) {
  check_instance(instance);
  RenderedInput out;
  out.orientation = orientation;
  out.subj = instance.subj;
  out.obj = instance.obj;

  auto append_span = [&](const Span& span) {
    out.tokens.insert(out.tokens.end(), instance.tokens.begin() + static_cast<std::ptrdiff_t>(span.begin),
                      instance.tokens.begin() + static_cast<std::ptrdiff_t>(span.end));
  };

  bool text_emitted = false;
  for (const auto& e : schema.elements) {
    switch (e.kind) {
      case Kind::kInput:
        if (text_emitted) break;
        text_emitted = true;
        out.tokens.insert(out.tokens.end(), instance.tokens.begin(), instance.tokens.end());
        break;
      case Kind::kEntity: {
        const dsl::Role role =
            orientation == Orientation::kReversed ? dsl::swap_entity_role(e.role) : e.role;
        append_span(role == dsl::Role::kSubject ? instance.subj : instance.obj);
        break;
      }
      case Kind::kMask:
        out.mask_positions.push_back(out.tokens.size());
        out.tokens.emplace_back("[MASK]");
        break;
      case Kind::kLearnable:
        out.learnable_positions.push_back(out.tokens.size());
        out.tokens.push_back(dsl::to_string(e));
        break;
      case Kind::kLiteral:
        out.tokens.push_back(e.word);
        break;
    }
  }
  return out;
}

RenderedInput render_plain(const Instance& instance) {
  check_instance(instance);
  RenderedInput out;
  out.tokens = instance.tokens;
  out.subj = instance.subj;
  out.obj = instance.obj;
  return out;
}

std::string to_display(const RenderedInput& input) {
  std::string out = "[CLS]";
  for (const auto& t : input.tokens) out += " " + t;
  return out + " [SEP]";
}

}  // namespace ptr::prompt
