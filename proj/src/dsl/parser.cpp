// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "ptr/error.hpp"
#include "ptr/rule_dsl.hpp"

namespace ptr::dsl {
namespace {

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

// Characters that end a bare class or template token.
bool is_delimiter(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0 || c == ';' || c == '{' || c == '}' ||
         c == '=' || c == '"' || c == '#' || c == '&';
}

// Returns the offset of the first malformed UTF-8 sequence, or npos.
std::size_t find_invalid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    if (c < 0x80) len = 1;
    else if ((c >> 5) == 0x6) len = 2;
    else if ((c >> 4) == 0xE) len = 3;
    else if ((c >> 3) == 0x1E) len = 4;
    else return i;
    if (i + len > s.size()) return i;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return i;
    }
    i += len;
  }
  return std::string_view::npos;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  TaskSpec parse() {
    if (auto bad = find_invalid_utf8(src_); bad != std::string_view::npos) {
      advance_to(bad);
      fail("invalid UTF-8 byte sequence");
    }
    skip_trivia();
    while (!at_end()) {
      const SourceLoc loc = here();
      const std::string keyword = read_identifier("statement keyword");
      if (keyword == "predicate") {
        parse_predicate(loc);
      } else if (keyword == "classes") {
        parse_classes();
      } else if (keyword == "negative") {
        parse_negative(loc);
      } else if (keyword == "rule") {
        parse_rule(loc);
      } else {
        fail_at(loc, "unknown statement '" + keyword +
                         "' (expected predicate, classes, negative or rule)");
      }
      skip_trivia();
    }
    finish();
    return std::move(spec_);
  }

 private:
  // ---- cursor -------------------------------------------------------------

  bool at_end() const { return pos_ >= src_.size(); }
  char peek() const { return at_end() ? '\0' : src_[pos_]; }
  SourceLoc here() const { return {line_, column_}; }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
      ++column_;
    }
    ++pos_;
  }

  void advance_to(std::size_t target) {
    while (pos_ < target && !at_end()) bump();
  }

  [[noreturn]] void fail(const std::string& message) const { fail_at(here(), message); }
  [[noreturn]] static void fail_at(SourceLoc loc, const std::string& message) {
    throw ParseError(message, loc.line, loc.column);
  }

  void skip_trivia() {
    while (!at_end()) {
      const char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') bump();
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    skip_trivia();
    if (peek() != c) {
      fail(std::string("expected '") + c + "'" + (at_end() ? " before end of input" : ""));
    }
    bump();
  }

  bool accept(char c) {
    skip_trivia();
    if (peek() != c) return false;
    bump();
    return true;
  }

  std::string read_identifier(const char* what) {
    skip_trivia();
    if (!is_ident_start(peek())) fail(std::string("expected ") + what);
    const std::size_t start = pos_;
    while (!at_end() && is_ident_char(peek())) bump();
    return std::string(src_.substr(start, pos_ - start));
  }

  std::string read_string() {
    skip_trivia();
    if (peek() != '"') fail("expected quoted string");
    bump();
    std::string out;
    for (;;) {
      if (at_end() || peek() == '\n') fail("unterminated string");
      char c = peek();
      bump();
      if (c == '"') break;
      if (c == '\\') {
        if (at_end()) fail("unterminated string");
        c = peek();
        if (c != '"' && c != '\\') fail("unknown escape sequence");
        bump();
      }
      out.push_back(c);
    }
    return out;
  }

  // Bare token up to a delimiter, or a quoted string.
  std::string read_class_token() {
    skip_trivia();
    if (peek() == '"') {
      std::string s = read_string();
      if (s.empty()) fail("empty class name");
      return s;
    }
    const std::size_t start = pos_;
    while (!at_end() && !is_delimiter(peek())) bump();
    if (pos_ == start) fail("expected class name");
    return std::string(src_.substr(start, pos_ - start));
  }

  // ---- statements ---------------------------------------------------------

  void parse_predicate(SourceLoc loc) {
    Predicate pred;
    pred.loc = loc;
    const SourceLoc name_loc = (skip_trivia(), here());
    pred.name = read_identifier("predicate name");
    if (spec_.find_predicate(pred.name)) {
      fail_at(name_loc, "duplicate predicate '" + pred.name + "'");
    }
    expect('(');
    do {
      const SourceLoc role_loc = (skip_trivia(), here());
      const std::string role = read_identifier("argument role (subj, obj or text)");
      if (role == "subj") pred.slots.push_back(Role::kSubject);
      else if (role == "obj") pred.slots.push_back(Role::kObject);
      else if (role == "text") pred.slots.push_back(Role::kText);
      else fail_at(role_loc, "unknown argument role '" + role + "'");
    } while (accept(','));
    expect(')');
    expect('{');
    bool have_template = false;
    bool have_labels = false;
    while (!accept('}')) {
      if ((skip_trivia(), at_end())) fail("expected '}' before end of input");
      const SourceLoc field_loc = here();
      const std::string field = read_identifier("field name (template or labels)");
      expect(':');
      if (field == "template") {
        if (have_template) fail_at(field_loc, "duplicate template field");
        have_template = true;
        pred.elements = parse_template();
      } else if (field == "labels") {
        if (have_labels) fail_at(field_loc, "duplicate labels field");
        have_labels = true;
        do {
          pred.label_words.push_back(read_string());
        } while (accept(','));
        expect(';');
      } else {
        fail_at(field_loc, "unknown predicate field '" + field + "'");
      }
    }
    if (!have_template) fail_at(loc, "predicate '" + pred.name + "' has no template");
    if (!have_labels) fail_at(loc, "predicate '" + pred.name + "' has no labels");
    spec_.predicates.push_back(std::move(pred));
  }

  std::vector<TemplateElement> parse_template() {
    std::vector<TemplateElement> out;
    for (;;) {
      skip_trivia();
      if (at_end()) fail("unterminated template (missing ';')");
      if (peek() == ';') {
        bump();
        break;
      }
      const SourceLoc loc = here();
      if (peek() == '"') {
        out.push_back(TemplateElement::literal(read_string()));
        continue;
      }
      const std::size_t start = pos_;
      while (!at_end() && !is_delimiter(peek())) bump();
      if (pos_ == start) fail("unexpected character in template");
      const std::string_view tok = src_.substr(start, pos_ - start);
      if (tok == "<text>") {
        out.push_back(TemplateElement::input());
      } else if (tok == "<subj>") {
        out.push_back(TemplateElement::entity(Role::kSubject));
      } else if (tok == "<obj>") {
        out.push_back(TemplateElement::entity(Role::kObject));
      } else if (tok == "[MASK]") {
        out.push_back(TemplateElement::mask());
      } else if (tok.size() > 3 && tok.substr(0, 2) == "[L" && tok.back() == ']') {
        const std::string_view digits = tok.substr(2, tok.size() - 3);
        int index = -1;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
        if (ec != std::errc() || ptr != digits.data() + digits.size() || index < 0 ||
            index > 4095) {
          fail_at(loc, "malformed learnable token '" + std::string(tok) + "'");
        }
        out.push_back(TemplateElement::learnable(index));
      } else if (tok.front() == '<' || tok.front() == '[') {
        fail_at(loc, "unknown placeholder '" + std::string(tok) + "'");
      } else {
        out.push_back(TemplateElement::literal(std::string(tok)));
      }
    }
    return out;
  }

  void parse_classes() {
    expect('{');
    while (!accept('}')) {
      if ((skip_trivia(), at_end())) fail("expected '}' before end of input");
      const SourceLoc loc = here();
      std::string name = read_class_token();
      if (std::find(spec_.classes.begin(), spec_.classes.end(), name) != spec_.classes.end()) {
        fail_at(loc, "duplicate class '" + name + "'");
      }
      spec_.classes.push_back(std::move(name));
      class_locs_.push_back(loc);
      expect(';');
    }
  }

  void parse_negative(SourceLoc loc) {
    if (spec_.negative_class) fail_at(loc, "negative class declared twice");
    negative_loc_ = (skip_trivia(), here());
    spec_.negative_class = read_class_token();
    expect(';');
  }

  void parse_rule(SourceLoc loc) {
    Rule rule;
    rule.loc = loc;
    const SourceLoc class_loc = (skip_trivia(), here());
    rule.class_label = read_class_token();
    skip_trivia();
    if (is_ident_start(peek())) {
      const SourceLoc flag_loc = here();
      const std::string flag = read_identifier("'reversed' or '='");
      if (flag != "reversed") fail_at(flag_loc, "unexpected '" + flag + "' (expected '=')");
      rule.reversed = true;
    }
    if (std::find(spec_.classes.begin(), spec_.classes.end(), rule.class_label) ==
        spec_.classes.end()) {
      fail_at(class_loc, "rule for undeclared class '" + rule.class_label + "'");
    }
    if (spec_.find_rule(rule.class_label)) {
      fail_at(class_loc, "duplicate rule for class '" + rule.class_label + "'");
    }
    expect('=');
    do {
      const SourceLoc conj_loc = (skip_trivia(), here());
      Conjunct c;
      c.predicate = read_identifier("predicate name");
      const Predicate* pred = spec_.find_predicate(c.predicate);
      if (!pred) fail_at(conj_loc, "rule references undeclared predicate '" + c.predicate + "'");
      expect('(');
      const SourceLoc phrase_loc = (skip_trivia(), here());
      c.phrase = read_string();
      if (std::find(pred->label_words.begin(), pred->label_words.end(), c.phrase) ==
          pred->label_words.end()) {
        fail_at(phrase_loc,
                "phrase \"" + c.phrase + "\" is not a label of predicate '" + c.predicate + "'");
      }
      expect(')');
      rule.conjuncts.push_back(std::move(c));
    } while (accept('&'));
    expect(';');
    spec_.rules.push_back(std::move(rule));
  }

  void finish() {
    for (std::size_t i = 0; i < spec_.classes.size(); ++i) {
      if (!spec_.find_rule(spec_.classes[i])) {
        fail_at(class_locs_[i], "class without rule: '" + spec_.classes[i] + "'");
      }
    }
    if (spec_.negative_class &&
        std::find(spec_.classes.begin(), spec_.classes.end(), *spec_.negative_class) ==
            spec_.classes.end()) {
      fail_at(negative_loc_, "negative class '" + *spec_.negative_class + "' is not declared");
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  TaskSpec spec_;
  std::vector<SourceLoc> class_locs_;
  SourceLoc negative_loc_;
};

}  // namespace

TaskSpec parse_task_spec(std::string_view source) { return Parser(source).parse(); }

}  // namespace ptr::dsl
