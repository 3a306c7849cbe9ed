// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <set>

#include "ptr/error.hpp"
#include "ptr/prompt.hpp"

namespace ptr::prompt {

using dsl::TemplateElement;
using Kind = dsl::TemplateElement::Kind;

std::vector<std::string> PromptSchema::class_labels() const {
  std::vector<std::string> out;
  out.reserve(classes.size());
  for (const auto& c : classes) out.push_back(c.label);
  return out;
}

std::optional<std::size_t> PromptSchema::class_index(std::string_view label) const {
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].label == label) return i;
  }
  return std::nullopt;
}

bool PromptSchema::uses(Orientation orientation) const {
  const bool want_reversed = orientation == Orientation::kReversed;
  return std::any_of(classes.begin(), classes.end(),
                     [&](const ClassVerbalizer& c) { return c.reversed == want_reversed; });
}

std::vector<std::string> PromptSchema::phrases(std::size_t c) const {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < n_masks(); ++j) out.push_back(mask_vocabs[j][classes.at(c).indices[j]]);
  return out;
}

PromptSchema compile(const dsl::TaskSpec& spec) {
  const dsl::ValidationReport report = dsl::validate(spec);
  if (!report.ok()) throw DataError("cannot compile invalid task spec:\n" + report.summary());

  PromptSchema schema;
  schema.negative_class = spec.negative_class;
  schema.elements.push_back(TemplateElement::input());

  const std::vector<std::string> order = spec.composition_order();
  for (const auto& name : order) {
    const dsl::Predicate& pred = *spec.find_predicate(name);
    std::vector<TemplateElement> sub;
    for (const auto& e : pred.elements) {
      if (e.kind != Kind::kInput) sub.push_back(e);
    }
    const TemplateElement& last = schema.elements.back();
    if (last.kind == Kind::kEntity &&
        std::find(sub.begin(), sub.end(), TemplateElement::entity(last.role)) != sub.end()) {
      schema.elements.pop_back();
    }
    schema.elements.insert(schema.elements.end(), sub.begin(), sub.end());
  }

  schema.mask_vocabs.resize(order.size());
  for (const auto& rule : spec.rules) {
    for (std::size_t j = 0; j < rule.conjuncts.size(); ++j) {
      auto& vocab = schema.mask_vocabs[j];
      if (std::find(vocab.begin(), vocab.end(), rule.conjuncts[j].phrase) == vocab.end()) {
        vocab.push_back(rule.conjuncts[j].phrase);
      }
    }
  }

  for (const auto& label : spec.classes) {
    const dsl::Rule& rule = *spec.find_rule(label);
    ClassVerbalizer cv;
    cv.label = label;
    cv.reversed = rule.reversed;
    for (std::size_t j = 0; j < rule.conjuncts.size(); ++j) {
      const auto& vocab = schema.mask_vocabs[j];
      cv.indices.push_back(static_cast<std::size_t>(
          std::find(vocab.begin(), vocab.end(), rule.conjuncts[j].phrase) - vocab.begin()));
    }
    schema.classes.push_back(std::move(cv));
  }

  for (std::size_t i = 0; i < schema.elements.size(); ++i) {
    if (schema.elements[i].kind == Kind::kLearnable) {
      schema.learnable_positions.push_back(i);
      schema.learnable_count = std::max(schema.learnable_count, schema.elements[i].learnable_index + 1);
    }
  }

  const auto masks = std::count_if(schema.elements.begin(), schema.elements.end(),
                                   [](const TemplateElement& e) { return e.kind == Kind::kMask; });
  if (static_cast<std::size_t>(masks) != schema.n_masks() || schema.n_masks() == 0) {
    throw DataError("compiled template has " + std::to_string(masks) + " masks but " +
                    std::to_string(schema.n_masks()) + " conjuncts");
  }
  std::set<std::vector<std::size_t>> tuples;
  for (const auto& c : schema.classes) {
    if (!tuples.insert(c.indices).second) {
      throw DataError("compiled verbalizer maps two classes to one tuple (class '" + c.label + "')");
    }
  }
  return schema;
}

dsl::TaskSpec reverse_relations(const dsl::TaskSpec& spec, const std::set<std::string>& subset) {
  dsl::TaskSpec out = spec;
  for (const auto& label : subset) {
    auto it = std::find_if(out.rules.begin(), out.rules.end(),
                           [&](const dsl::Rule& r) { return r.class_label == label; });
    if (std::find(out.classes.begin(), out.classes.end(), label) == out.classes.end() ||
        it == out.rules.end()) {
      throw DataError("cannot reverse '" + label + "': class not in spec");
    }
    const bool has_binary = std::any_of(it->conjuncts.begin(), it->conjuncts.end(), [&](const auto& c) {
      const dsl::Predicate* p = out.find_predicate(c.predicate);
      return p && p->arity() == 2;
    });
    if (!has_binary) {
      throw DataError("cannot reverse '" + label + "': its rule has no binary conjunct");
    }
    it->reversed = !it->reversed;
  }
  return out;
}

}  // namespace ptr::prompt
