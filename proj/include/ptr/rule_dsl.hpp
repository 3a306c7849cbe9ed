// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

// Rule language: predicates (conditional functions) with sub-prompt templates
// and label phrases, a class inventory, and one conjunctive rule per class.
//
//   predicate subj_type(subj) {
//     template: <text> the [MASK] <subj>;
//     labels: "person", "organization";
//   }
//   classes { per:parents; org:parents; }
//   negative no_relation;
//   rule per:parents = subj_type("person") & rel("'s parent was") & obj_type("person");
//
// The full grammar is documented in docs/rule_language.md.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ptr::dsl {

/// Argument a predicate ranges over. kText marks a predicate over the whole
/// input (e.g. sentiment) that mentions no entity.
enum class Role { kSubject, kObject, kText };

std::string_view role_name(Role role);  // "subj", "obj", "text"
Role swap_entity_role(Role role);       // subj <-> obj, text unchanged

struct SourceLoc {
  int line = 0;
  int column = 0;
};

struct TemplateElement {
  enum class Kind { kLiteral, kEntity, kMask, kLearnable, kInput };

  Kind kind = Kind::kLiteral;
  std::string word;         // kLiteral
  Role role = Role::kText;  // kEntity: kSubject or kObject
  int learnable_index = 0;  // kLearnable

  static TemplateElement literal(std::string word);
  static TemplateElement entity(Role role);
  static TemplateElement mask();
  static TemplateElement learnable(int index);
  static TemplateElement input();

  friend bool operator==(const TemplateElement&, const TemplateElement&) = default;
};

/// Surface form used by the printer and the schema document:
/// `<text>`, `<subj>`, `<obj>`, `[MASK]`, `[L3]`, or the literal word.
std::string to_string(const TemplateElement& element);

struct Predicate {
  std::string name;
  std::vector<Role> slots;  // declared argument list; arity == slots.size()
  std::vector<TemplateElement> elements;
  std::vector<std::string> label_words;  // each entry is one atomic label phrase
  SourceLoc loc;

  int arity() const { return static_cast<int>(slots.size()); }

  friend bool operator==(const Predicate& a, const Predicate& b) {
    return a.name == b.name && a.slots == b.slots && a.elements == b.elements &&
           a.label_words == b.label_words;
  }
};

struct Conjunct {
  std::string predicate;
  std::string phrase;
  friend bool operator==(const Conjunct&, const Conjunct&) = default;
};

struct Rule {
  std::string class_label;
  std::vector<Conjunct> conjuncts;
  bool reversed = false;  // subject/object roles swapped for this class
  SourceLoc loc;

  friend bool operator==(const Rule& a, const Rule& b) {
    return a.class_label == b.class_label && a.conjuncts == b.conjuncts &&
           a.reversed == b.reversed;
  }
};

struct TaskSpec {
  std::vector<Predicate> predicates;  // declaration order
  std::vector<std::string> classes;   // declaration order defines tie-breaks
  std::optional<std::string> negative_class;
  std::vector<Rule> rules;

  const Predicate* find_predicate(std::string_view name) const;
  const Rule* find_rule(std::string_view class_label) const;
  /// Predicate names of the first rule; validate() checks every rule agrees.
  std::vector<std::string> composition_order() const;

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

/// Parses rule-language source. Throws ParseError (line/column) on syntax
/// errors, duplicate names, references to undeclared predicates, classes or
/// phrases, and classes left without a rule. Never aborts on arbitrary bytes.
TaskSpec parse_task_spec(std::string_view source);

/// Reads and parses a .ptr file; IO failures throw DataError naming the path.
TaskSpec load_task_spec(const std::filesystem::path& path);

/// Canonical, byte-stable rendering; parse_task_spec(print_task_spec(s)) == s.
std::string print_task_spec(const TaskSpec& spec);

struct Finding {
  enum class Severity { kError, kWarning };
  Severity severity = Severity::kError;
  std::string code;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const { return error_count() == 0; }
  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool has(std::string_view code) const;
  std::string summary() const;
};

/// Checks every TaskSpec invariant plus joint-verbalizer injectivity. Warns
/// when one phrase is used at more than one mask position or is never used.
ValidationReport validate(const TaskSpec& spec);

}  // namespace ptr::dsl
