// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <sstream>

#include "ptr/corpus.hpp"
#include "ptr/error.hpp"
#include "ptr/rng.hpp"

namespace ptr::corpus {

namespace {

using Words = std::vector<std::string>;
using Lexicon = std::vector<Words>;

Lexicon split_all(std::initializer_list<const char*> names) {
  Lexicon out;
  for (const char* name : names) {
    Words w;
    std::istringstream in(name);
    for (std::string t; in >> t;) w.push_back(t);
    out.push_back(std::move(w));
  }
  return out;
}

const Lexicon& people() {
  static const Lexicon lex = split_all(
      {"alice", "bob", "carol", "david", "mark twain", "emma stone", "frank", "grace hopper", "henry",
       "irene", "jack london", "karen", "liam", "maria lopez", "nina", "oscar wilde", "paul", "quinn",
       "rosa parks", "sam", "tara", "umar", "vera", "walt whitman"});
  return lex;
}

const Lexicon& organizations() {
  static const Lexicon lex = split_all(
      {"acme corp", "globex", "initech", "umbrella inc", "hooli", "stark industries",
       "wayne enterprises", "cyberdyne", "soylent corp", "tyrell corp", "vandelay industries",
       "wonka industries", "gringotts", "oscorp", "monarch group", "aperture labs",
       "nakatomi trading", "dunder mifflin", "pied piper", "massive dynamic"});
  return lex;
}

const Lexicon& cities() {
  static const Lexicon lex = split_all(
      {"paris", "rome", "berlin", "madrid", "lisbon", "vienna", "prague", "oslo", "dublin", "athens",
       "new york", "los angeles", "boston", "chicago", "tokyo", "seoul", "cairo", "lima", "quito",
       "denver"});
  return lex;
}

// FNV-1a; fixes pseudo-word lexicons independently of any seed.
std::uint64_t fnv1a(const std::string& s, std::uint64_t salt) {
  std::uint64_t h = 1469598103934665603ULL ^ salt;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Lexicon pseudo_lexicon(const std::string& type) {
  static const char* const kSyllables[] = {"ka", "lo", "mi", "ren", "su", "ta", "vo", "zel",
                                           "bri", "dor", "fen", "gu", "hal", "jor", "nep", "qui"};
  Lexicon out;
  for (std::uint64_t i = 0; out.size() < 16; ++i) {
    const std::uint64_t h = fnv1a(type, i);
    std::string w = std::string(kSyllables[h & 15]) + kSyllables[(h >> 4) & 15] + kSyllables[(h >> 8) & 15];
    if (std::none_of(out.begin(), out.end(), [&](const Words& x) { return x[0] == w; })) out.push_back({w});
  }
  return out;
}

struct ClassPlan {
  std::string label;
  std::string subj_type = "entity";
  std::string obj_type = "entity";
  Words cue;
  std::vector<Words> frames;
};

std::vector<Words> parse_frames(const std::string& label, const std::vector<std::string>& frames) {
  std::vector<Words> out;
  for (const auto& f : frames) {
    Words w;
    std::istringstream in(f);
    for (std::string t; in >> t;) w.push_back(t);
    if (std::count(w.begin(), w.end(), "<subj>") != 1 || std::count(w.begin(), w.end(), "<obj>") != 1) {
      throw DataError("frame for class '" + label + "' must contain <subj> and <obj> exactly once: " + f);
    }
    out.push_back(std::move(w));
  }
  return out;
}

const std::vector<Words>& default_frames() {
  static const std::vector<Words> frames = {
      {"<subj>", "<cue>", "<obj>", "."},
      {"<subj>", "<cue>", "<obj>", ",", "officials", "said", "."},
      {"reports", "say", "<subj>", "<cue>", "<obj>", "."},
  };
  return frames;
}

// Distractor clauses; "<x>" is the distractor entity.
const std::vector<Words>& prefix_distractors() {
  static const std::vector<Words> d = {
      {"according", "to", "<x>", ","}, {"<x>", "noted", "that"}, {"unlike", "<x>", ","}};
  return d;
}

const std::vector<Words>& suffix_distractors() {
  static const std::vector<Words> d = {
      {"<x>", "was", "also", "there", "."}, {"nobody", "asked", "<x>", "."}, {"and", "<x>", "agreed", "."}};
  return d;
}

std::vector<ClassPlan> plan(const dsl::TaskSpec& spec, const SurfaceOptions& options) {
  std::vector<ClassPlan> plans;
  for (const auto& label : spec.classes) {
    const dsl::Rule* rule = spec.find_rule(label);
    if (!rule) throw DataError("class '" + label + "' has no rule");
    ClassPlan p;
    p.label = label;
    for (const auto& c : rule->conjuncts) {
      const dsl::Predicate* pred = spec.find_predicate(c.predicate);
      if (!pred) throw DataError("rule for '" + label + "' uses undeclared predicate '" + c.predicate + "'");
      if (pred->arity() == 1 && pred->slots[0] != dsl::Role::kText) {
        dsl::Role role = pred->slots[0];
        if (rule->reversed) role = dsl::swap_entity_role(role);
        (role == dsl::Role::kSubject ? p.subj_type : p.obj_type) = c.phrase;
      } else {
        std::istringstream in(c.phrase);
        for (std::string t; in >> t;) p.cue.push_back(t);
      }
    }
    auto it = options.frames.find(label);
    p.frames = it != options.frames.end() ? parse_frames(label, it->second) : default_frames();
    if (p.frames.empty()) p.frames = default_frames();
    plans.push_back(std::move(p));
  }
  return plans;
}

void append(Words& out, const Words& w) { out.insert(out.end(), w.begin(), w.end()); }

const Words& draw_other(Rng& rng, const Lexicon& lex, const std::vector<const Words*>& avoid) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const Words& w = lex[rng.uniform_index(lex.size())];
    if (std::none_of(avoid.begin(), avoid.end(), [&](const Words* a) { return *a == w; })) return w;
  }
  throw DataError("lexicon too small to draw distinct entities");
}

}  // namespace

Lexicon lexicon(const std::string& type) {
  if (type == "person") return people();
  if (type == "organization") return organizations();
  if (type == "city") return cities();
  if (type == "country") {
    return split_all({"france", "italy", "spain", "japan", "brazil", "canada", "kenya", "peru", "chile",
                      "norway", "egypt", "india", "mexico", "new zealand", "portugal", "greece"});
  }
  if (type == "state") {
    return split_all({"florida", "texas", "ohio", "utah", "oregon", "nevada", "vermont", "georgia",
                      "kansas", "iowa", "new jersey", "maine"});
  }
  if (type == "number") {
    return split_all({"12", "17", "23", "31", "42", "58", "64", "75", "88", "96", "105", "250", "1200", "3000"});
  }
  if (type == "entity") {
    Lexicon all = people();
    for (const auto& w : organizations()) all.push_back(w);
    for (const auto& w : cities()) all.push_back(w);
    return all;
  }
  return pseudo_lexicon(type);
}

Dataset generate_synthetic(const dsl::TaskSpec& spec, std::size_t n_per_class, std::uint64_t seed,
                           double noise_rate, const SurfaceOptions& options) {
  if (!(noise_rate >= 0.0 && noise_rate < 1.0)) throw DataError("noise_rate must lie in [0, 1)");
  const std::vector<ClassPlan> plans = plan(spec, options);

  std::vector<std::string> types;
  std::vector<Lexicon> lexicons;
  auto lex_for = [&](const std::string& type) -> const Lexicon& {
    auto it = std::find(types.begin(), types.end(), type);
    if (it != types.end()) return lexicons[static_cast<std::size_t>(it - types.begin())];
    types.push_back(type);
    lexicons.push_back(lexicon(type));
    return lexicons.back();
  };
  for (const auto& p : plans) {
    lex_for(p.subj_type);
    lex_for(p.obj_type);
  }

  Dataset ds;
  ds.split = "synthetic";
  ds.classes = spec.classes;
  Rng rng(seed);
  for (std::size_t c = 0; c < plans.size(); ++c) {
    const ClassPlan& p = plans[c];
    for (std::size_t i = 0; i < n_per_class; ++i) {
      const Words& frame = p.frames[rng.uniform_index(p.frames.size())];
      const Words& subj = lex_for(p.subj_type)[rng.uniform_index(lex_for(p.subj_type).size())];
      const Words& obj = draw_other(rng, lex_for(p.obj_type), {&subj});

      Words main;
      Span subj_span, obj_span;
      for (const auto& tok : frame) {
        if (tok == "<subj>") {
          subj_span.begin = main.size();
          append(main, subj);
          subj_span.end = main.size();
        } else if (tok == "<obj>") {
          obj_span.begin = main.size();
          append(main, obj);
          obj_span.end = main.size();
        } else if (tok == "<cue>") {
          append(main, p.cue);
        } else {
          main.push_back(tok);
        }
      }

      Instance inst;
      if (rng.uniform01() < options.distractor_rate) {
        const Lexicon& lex = lexicons[rng.uniform_index(lexicons.size())];
        const Words& x = draw_other(rng, lex, {&subj, &obj});
        const bool prefix = rng.uniform_index(2) == 0;
        const auto& pool = prefix ? prefix_distractors() : suffix_distractors();
        Words clause;
        for (const auto& tok : pool[rng.uniform_index(pool.size())]) {
          if (tok == "<x>") {
            append(clause, x);
          } else {
            clause.push_back(tok);
          }
        }
        if (prefix) {
          const std::size_t shift = clause.size();
          subj_span = {subj_span.begin + shift, subj_span.end + shift};
          obj_span = {obj_span.begin + shift, obj_span.end + shift};
          inst.tokens = std::move(clause);
          append(inst.tokens, main);
        } else {
          inst.tokens = std::move(main);
          append(inst.tokens, clause);
        }
      } else {
        inst.tokens = std::move(main);
      }
      inst.subj = subj_span;
      inst.obj = obj_span;
      inst.label = p.label;
      if (rng.uniform01() < noise_rate && plans.size() > 1) {
        std::size_t other = rng.uniform_index(plans.size() - 1);
        if (other >= c) ++other;
        inst.label = plans[other].label;
      }
      inst.id = "syn-" + std::to_string(seed) + "-" + std::to_string(c) + "-" + std::to_string(i);
      ds.instances.push_back(std::move(inst));
    }
  }
  return ds;
}

}  // namespace ptr::corpus
