// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "ptr/rule_dsl.hpp"

namespace ptr::dsl {
namespace {

std::string join_tuple(const std::vector<std::string>& phrases) {
  std::string out = "(";
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    if (i) out += ", ";
    out += phrases[i];
  }
  return out + ")";
}

bool has_space(std::string_view s) {
  return std::any_of(s.begin(), s.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

class Checker {
 public:
  explicit Checker(const TaskSpec& spec) : spec_(spec) {}

  ValidationReport run() {
    check_predicates();
    check_classes();
    check_rules();
    check_verbalizer();
    return std::move(report_);
  }

 private:
  void error(std::string code, std::string message) {
    report_.findings.push_back({Finding::Severity::kError, std::move(code), std::move(message)});
  }
  void warning(std::string code, std::string message) {
    report_.findings.push_back({Finding::Severity::kWarning, std::move(code), std::move(message)});
  }

  void check_predicates() {
    std::set<std::string> names;
    for (const auto& p : spec_.predicates) {
      const std::string who = "predicate '" + p.name + "'";
      if (!names.insert(p.name).second) error("duplicate-predicate", "duplicate " + who);

      const auto masks = std::count_if(p.elements.begin(), p.elements.end(), [](const auto& e) {
        return e.kind == TemplateElement::Kind::kMask;
      });
      if (masks != 1) {
        error("mask-count", who + " template must contain exactly one [MASK], found " +
                                std::to_string(masks));
      }

      std::vector<Role> entity_roles;
      for (const auto& e : p.elements) {
        if (e.kind == TemplateElement::Kind::kEntity &&
            std::find(entity_roles.begin(), entity_roles.end(), e.role) == entity_roles.end()) {
          entity_roles.push_back(e.role);
        }
        if (e.kind == TemplateElement::Kind::kLiteral && (e.word.empty() || has_space(e.word))) {
          error("bad-literal", who + " has an empty or whitespace-containing literal word");
        }
      }
      check_slots(p, entity_roles);

      if (p.label_words.empty()) error("empty-labels", who + " declares no label phrases");
      std::set<std::string> seen;
      for (const auto& w : p.label_words) {
        if (w.empty()) error("empty-label", who + " has an empty label phrase");
        if (!seen.insert(w).second) {
          error("duplicate-label", who + " repeats label phrase \"" + w + "\"");
        }
      }
    }
  }

  void check_slots(const Predicate& p, const std::vector<Role>& entity_roles) {
    const std::string who = "predicate '" + p.name + "'";
    if (p.arity() < 1 || p.arity() > 2) {
      error("arity", who + " must have arity 1 or 2, has " + std::to_string(p.arity()));
      return;
    }
    std::set<Role> declared(p.slots.begin(), p.slots.end());
    if (declared.size() != p.slots.size()) {
      error("arity", who + " repeats an argument role");
      return;
    }
    const bool text_only = p.slots.size() == 1 && p.slots.front() == Role::kText;
    if (text_only) {
      if (!entity_roles.empty()) {
        error("arity", who + " is declared over (text) but its template mentions an entity");
      }
      return;
    }
    if (declared.count(Role::kText)) {
      error("arity", who + " mixes the text role with entity roles");
      return;
    }
    std::set<Role> used(entity_roles.begin(), entity_roles.end());
    if (used != declared) {
      error("arity", who + " declares arity " + std::to_string(p.arity()) +
                         " but its template uses " + std::to_string(used.size()) +
                         " distinct entity placeholder(s)");
    }
  }

  void check_classes() {
    if (spec_.classes.empty()) error("no-classes", "task declares no classes");
    std::set<std::string> names;
    for (const auto& c : spec_.classes) {
      if (c.empty()) error("empty-class", "empty class name");
      if (!names.insert(c).second) error("duplicate-class", "duplicate class '" + c + "'");
    }
    for (const auto& c : spec_.classes) {
      const auto n = std::count_if(spec_.rules.begin(), spec_.rules.end(),
                                   [&](const Rule& r) { return r.class_label == c; });
      if (n == 0) error("class-without-rule", "class without rule: '" + c + "'");
      if (n > 1) error("duplicate-rule", "class '" + c + "' has " + std::to_string(n) + " rules");
    }
    if (spec_.negative_class && !names.count(*spec_.negative_class)) {
      error("unknown-negative", "negative class '" + *spec_.negative_class + "' is not declared");
    }
  }

  void check_rules() {
    const std::vector<std::string> order = spec_.composition_order();
    std::set<std::string> classes(spec_.classes.begin(), spec_.classes.end());
    for (const auto& rule : spec_.rules) {
      const std::string who = "rule for '" + rule.class_label + "'";
      if (!classes.count(rule.class_label)) error("unknown-class", who + " names an undeclared class");
      if (rule.conjuncts.empty()) error("empty-rule", who + " has no conjuncts");
      std::vector<std::string> names;
      bool has_binary = false;
      for (const auto& c : rule.conjuncts) {
        names.push_back(c.predicate);
        const Predicate* p = spec_.find_predicate(c.predicate);
        if (!p) {
          error("unknown-predicate", who + " references undeclared predicate '" + c.predicate + "'");
          continue;
        }
        has_binary = has_binary || p->arity() == 2;
        if (std::find(p->label_words.begin(), p->label_words.end(), c.phrase) ==
            p->label_words.end()) {
          error("unknown-phrase", who + " uses \"" + c.phrase + "\" which is not a label of '" +
                                      c.predicate + "'");
        }
      }
      if (names != order) {
        error("inconsistent-composition-order",
              "inconsistent composition order: " + who + " does not follow the predicate order of '" +
                  spec_.rules.front().class_label + "'");
      }
      if (rule.reversed && !has_binary) {
        error("reversed-without-binary", who + " is reversed but has no binary conjunct");
      }
    }
  }

  void check_verbalizer() {
    const std::vector<std::string> order = spec_.composition_order();
    std::map<std::vector<std::string>, std::string> owner;
    std::vector<std::map<std::string, bool>> used(order.size());
    for (const auto& rule : spec_.rules) {
      if (rule.conjuncts.size() != order.size()) continue;
      std::vector<std::string> tuple;
      for (std::size_t j = 0; j < rule.conjuncts.size(); ++j) {
        tuple.push_back(rule.conjuncts[j].phrase);
        used[j][rule.conjuncts[j].phrase] = true;
      }
      auto [it, inserted] = owner.emplace(tuple, rule.class_label);
      if (!inserted) {
        error("non-injective-verbalizer", "non-injective joint verbalizer: classes '" + it->second +
                                              "' and '" + rule.class_label + "' both map to " +
                                              join_tuple(tuple));
      }
    }

    std::map<std::string, std::vector<std::size_t>> positions;
    for (std::size_t j = 0; j < used.size(); ++j) {
      for (const auto& [phrase, _] : used[j]) positions[phrase].push_back(j + 1);
    }
    for (const auto& [phrase, where] : positions) {
      if (where.size() > 1) {
        std::string list;
        for (auto j : where) list += (list.empty() ? "" : ", ") + std::to_string(j);
        warning("phrase-multiple-positions",
                "phrase \"" + phrase + "\" appears in the vocabularies of mask positions " + list);
      }
    }
    for (const auto& p : spec_.predicates) {
      for (const auto& w : p.label_words) {
        bool referenced = std::any_of(spec_.rules.begin(), spec_.rules.end(), [&](const Rule& r) {
          return std::any_of(r.conjuncts.begin(), r.conjuncts.end(), [&](const Conjunct& c) {
            return c.predicate == p.name && c.phrase == w;
          });
        });
        if (!referenced) {
          warning("unused-label", "label \"" + w + "\" of predicate '" + p.name +
                                      "' is not used by any rule");
        }
      }
    }
  }

  const TaskSpec& spec_;
  ValidationReport report_;
};

}  // namespace

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(), [](const auto& f) {
    return f.severity == Finding::Severity::kError;
  }));
}

std::size_t ValidationReport::warning_count() const { return findings.size() - error_count(); }

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(findings.begin(), findings.end(),
                     [&](const Finding& f) { return f.code == code; });
}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& f : findings) {
    out += f.severity == Finding::Severity::kError ? "error" : "warning";
    out += " [" + f.code + "] " + f.message + "\n";
  }
  return out;
}

ValidationReport validate(const TaskSpec& spec) { return Checker(spec).run(); }

}  // namespace ptr::dsl
