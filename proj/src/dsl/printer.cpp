// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <cctype>
#include <string>

#include "ptr/rule_dsl.hpp"

namespace ptr::dsl {
namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

bool bare_safe(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == ';' || c == '{' || c == '}' ||
        c == '=' || c == '"' || c == '#' || c == '&') {
      return false;
    }
  }
  return true;
}

std::string class_token(std::string_view name) {
  return bare_safe(name) ? std::string(name) : quote(name);
}

std::string template_token(const TemplateElement& e) {
  if (e.kind != TemplateElement::Kind::kLiteral) return to_string(e);
  const bool looks_reserved = !e.word.empty() && (e.word.front() == '<' || e.word.front() == '[');
  return bare_safe(e.word) && !looks_reserved ? e.word : quote(e.word);
}

}  // namespace

std::string print_task_spec(const TaskSpec& spec) {
  std::string out;
  for (const auto& pred : spec.predicates) {
    out += "predicate " + pred.name + "(";
    for (std::size_t i = 0; i < pred.slots.size(); ++i) {
      if (i) out += ", ";
      out += role_name(pred.slots[i]);
    }
    out += ") {\n  template:";
    for (const auto& e : pred.elements) out += " " + template_token(e);
    out += ";\n  labels:";
    for (std::size_t i = 0; i < pred.label_words.size(); ++i) {
      out += (i ? ", " : " ") + quote(pred.label_words[i]);
    }
    out += ";\n}\n\n";
  }
  out += "classes {\n";
  for (const auto& c : spec.classes) out += "  " + class_token(c) + ";\n";
  out += "}\n";
  if (spec.negative_class) out += "\nnegative " + class_token(*spec.negative_class) + ";\n";
  if (!spec.rules.empty()) out += "\n";
  for (const auto& rule : spec.rules) {
    out += "rule " + class_token(rule.class_label);
    if (rule.reversed) out += " reversed";
    out += " =";
    for (std::size_t i = 0; i < rule.conjuncts.size(); ++i) {
      const auto& c = rule.conjuncts[i];
      out += (i ? " & " : " ") + c.predicate + "(" + quote(c.phrase) + ")";
    }
    out += ";\n";
  }
  return out;
}

}  // namespace ptr::dsl
