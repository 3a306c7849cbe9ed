// Copyright 2026 The ptrkit Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "ptr/error.hpp"
#include "ptr/prompt.hpp"
#include "ptr/rng.hpp"
#include "spec_gen.hpp"
#include "test_util.hpp"

namespace ptr::prompt {
namespace {

using test::bundled_spec;
using test::join;

std::string template_line(const PromptSchema& schema) {
  std::vector<std::string> parts;
  for (const auto& e : schema.elements) parts.push_back(dsl::to_string(e));
  return join(parts);
}

Instance twain() { return test::make_instance("twain", "Mark Twain was born in Florida .", {0, 2}, {5, 6}, "per:city_of_birth"); }

TEST(Compile, TacredTemplateAndVerbalizer) {
  const auto schema = compile(bundled_spec("tacred.ptr"));
  EXPECT_EQ(template_line(schema), "<text> the [MASK] <subj> [MASK] the [MASK] <obj>");
  ASSERT_EQ(schema.n_masks(), 3u);
  for (const char* w : {"person", "organization", "entity"}) {
    EXPECT_NE(std::find(schema.mask_vocabs[0].begin(), schema.mask_vocabs[0].end(), w), schema.mask_vocabs[0].end());
  }
  const auto c = schema.class_index("per:parents");
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(schema.phrases(*c), (std::vector<std::string>{"person", "'s parent was", "person"}));
  EXPECT_EQ(schema.negative_class, "no_relation");
}

TEST(Compile, SemevalTemplate) {
  const auto schema = compile(bundled_spec("semeval.ptr"));
  EXPECT_EQ(template_line(schema), "<text> The [MASK] <subj> was [MASK] to the [MASK] <obj>");
}

TEST(Compile, SingleUnaryPredicate) {
  const auto schema = compile(dsl::parse_task_spec(R"(
predicate sentiment(text) { template: <text> it was [MASK] .; labels: "great", "terrible"; }
classes { positive; negative; }
rule positive = sentiment("great");
rule negative = sentiment("terrible");
)"));
  EXPECT_EQ(schema.n_masks(), 1u);
  EXPECT_EQ(template_line(schema), "<text> it was [MASK] .");
  EXPECT_EQ(schema.classes[1].indices, std::vector<std::size_t>{1});
}

TEST(Compile, VocabulariesInFirstSeenOrder) {
  const auto schema = compile(bundled_spec("synthetic4.ptr"));
  EXPECT_EQ(schema.mask_vocabs[0], (std::vector<std::string>{"person", "organization"}));
  EXPECT_EQ(schema.mask_vocabs[1],
            (std::vector<std::string>{"was born in", "lived in", "'s member was", "'s parent was"}));
  EXPECT_EQ(schema.mask_vocabs[2], (std::vector<std::string>{"city", "organization"}));
}

TEST(Compile, LearnableTokens) {
  const auto schema = compile(dsl::parse_task_spec(R"(
predicate s(text) { template: [L1] <text> [L0] [MASK]; labels: "a", "b"; }
classes { x; y; }
rule x = s("a");
rule y = s("b");
)"));
  EXPECT_EQ(schema.learnable_count, 2);
  ASSERT_EQ(schema.learnable_positions.size(), 2u);
  const auto r = render(schema, test::make_instance("i", "hello there", {0, 1}, {1, 2}, "x"));
  EXPECT_EQ(join(r.tokens), "hello there [L1] [L0] [MASK]");
  EXPECT_EQ(r.learnable_positions, (std::vector<std::size_t>{2, 3}));
}

TEST(Compile, RefusesInvalidSpec) {
  auto spec = bundled_spec("synthetic4.ptr");
  spec.rules[1].conjuncts = spec.rules[0].conjuncts;
  EXPECT_THROW(compile(spec), DataError);
}

TEST(Render, TwainForward) {
  const auto schema = compile(bundled_spec("tacred.ptr"));
  const auto r = render(schema, twain());
  EXPECT_EQ(join(r.tokens),
            "Mark Twain was born in Florida . the [MASK] Mark Twain [MASK] the [MASK] Florida");
  EXPECT_EQ(r.mask_positions, (std::vector<std::size_t>{8, 11, 13}));
  EXPECT_EQ(to_display(r), "[CLS] " + join(r.tokens) + " [SEP]");
}

TEST(Render, TwainReversed) {
  const auto spec = reverse_relations(bundled_spec("tacred.ptr"), {"per:city_of_birth"});
  const auto schema = compile(spec);
  EXPECT_TRUE(schema.uses(Orientation::kReversed));
  const auto r = render(schema, twain(), Orientation::kReversed);
  EXPECT_EQ(join(r.tokens),
            "Mark Twain was born in Florida . the [MASK] Florida [MASK] the [MASK] Mark Twain");
  EXPECT_EQ(r.orientation, Orientation::kReversed);
}

TEST(Render, InputErrors) {
  const auto schema = compile(bundled_spec("tacred.ptr"));
  auto inst = twain();
  inst.tokens.clear();
  try {
    render(schema, inst);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("empty input"), std::string::npos);
  }
  inst = twain();
  inst.obj = {5, 9};
  EXPECT_THROW(render(schema, inst), DataError);
  inst = twain();
  inst.obj = {1, 3};
  EXPECT_THROW(render(schema, inst), DataError);
  inst = twain();
  inst.subj = {2, 2};
  EXPECT_THROW(render(schema, inst), DataError);
}

TEST(Reverse, UnknownClassAndNoBinaryConjunct) {
  EXPECT_THROW(reverse_relations(bundled_spec("tacred.ptr"), {"nope"}), DataError);
  const auto unary = dsl::parse_task_spec(R"(
predicate s(subj) { template: the [MASK] <subj>; labels: "a", "b"; }
classes { x; y; }
rule x = s("a");
rule y = s("b");
)");
  EXPECT_THROW(reverse_relations(unary, {"x"}), DataError);
}

TEST(Reverse, EmptySubsetIsIdentity) {
  const auto spec = bundled_spec("tacred.ptr");
  EXPECT_EQ(reverse_relations(spec, {}), spec);
}

std::set<std::string> random_subset(const std::vector<std::string>& classes, Rng& rng) {
  std::set<std::string> out;
  for (const auto& c : classes) {
    if (rng.uniform_index(2)) out.insert(c);
  }
  return out;
}

// Valid specs drawn from the bundled set and the random generator.
std::vector<dsl::TaskSpec> valid_specs() {
  std::vector<dsl::TaskSpec> out;
  for (const char* name : {"synthetic4.ptr", "tacred.ptr", "semeval.ptr", "direction.ptr"}) {
    out.push_back(bundled_spec(name));
  }
  Rng rng(5);
  while (out.size() < 200) {
    auto spec = test::random_spec(rng);
    if (dsl::validate(spec).ok()) out.push_back(std::move(spec));
  }
  return out;
}

bool has_binary(const dsl::TaskSpec& spec) {
  return std::any_of(spec.predicates.begin(), spec.predicates.end(), [](const auto& p) { return p.arity() == 2; });
}

TEST(Properties, MaskCountEqualsComposition) {
  for (const auto& spec : valid_specs()) {
    const auto schema = compile(spec);
    EXPECT_EQ(schema.n_masks(), spec.composition_order().size());
    std::set<std::vector<std::size_t>> tuples;
    for (const auto& c : schema.classes) {
      ASSERT_EQ(c.indices.size(), schema.n_masks());
      for (std::size_t j = 0; j < schema.n_masks(); ++j) EXPECT_LT(c.indices[j], schema.mask_vocabs[j].size());
      EXPECT_TRUE(tuples.insert(c.indices).second) << c.label;
    }
    EXPECT_EQ(compile(spec), schema);  // deterministic
  }
}

TEST(Properties, ReversalIsAnInvolutionAndKeepsVocabularies) {
  Rng rng(17);
  for (const auto& spec : valid_specs()) {
    if (!has_binary(spec)) continue;
    const auto subset = random_subset(spec.classes, rng);
    const auto rev = reverse_relations(spec, subset);
    EXPECT_EQ(reverse_relations(rev, subset), spec);
    const auto a = compile(spec);
    const auto b = compile(rev);
    EXPECT_EQ(a.n_masks(), b.n_masks());
    for (std::size_t j = 0; j < a.n_masks(); ++j) {
      auto va = a.mask_vocabs[j];
      auto vb = b.mask_vocabs[j];
      std::sort(va.begin(), va.end());
      std::sort(vb.begin(), vb.end());
      EXPECT_EQ(va, vb);
    }
    for (std::size_t c = 0; c < a.classes.size(); ++c) {
      EXPECT_EQ(b.classes[c].reversed, a.classes[c].reversed != (subset.count(a.classes[c].label) == 1));
    }
  }
}

Instance random_instance(Rng& rng) {
  const std::size_t n = 2 + rng.uniform_index(12);
  Instance inst;
  inst.id = "r";
  for (std::size_t i = 0; i < n; ++i) inst.tokens.push_back("w" + std::to_string(rng.uniform_index(6)));
  const std::size_t cut = 1 + rng.uniform_index(n - 1);
  Span left{rng.uniform_index(cut), cut};
  Span right{cut, cut + 1 + rng.uniform_index(n - cut)};
  if (rng.uniform_index(2)) std::swap(left, right);
  inst.subj = left;
  inst.obj = right;
  return inst;
}

TEST(Properties, RenderKeepsInstanceTokensContiguousAndMasksOrdered) {
  Rng rng(23);
  const auto specs = valid_specs();
  for (int i = 0; i < 500; ++i) {
    const auto schema = compile(specs[rng.uniform_index(specs.size())]);
    const auto inst = random_instance(rng);
    for (auto orientation : {Orientation::kForward, Orientation::kReversed}) {
      const auto r = render(schema, inst, orientation);
      const bool has_input = std::any_of(schema.elements.begin(), schema.elements.end(),
                                         [](const auto& e) { return e.kind == dsl::TemplateElement::Kind::kInput; });
      if (has_input) {
        ASSERT_GE(r.tokens.size(), inst.tokens.size());
        EXPECT_TRUE(std::equal(inst.tokens.begin(), inst.tokens.end(), r.tokens.begin()));
      }
      EXPECT_EQ(r.mask_positions.size(), schema.n_masks());
      EXPECT_TRUE(std::is_sorted(r.mask_positions.begin(), r.mask_positions.end()));
      EXPECT_EQ(std::adjacent_find(r.mask_positions.begin(), r.mask_positions.end()), r.mask_positions.end());
      for (auto p : r.mask_positions) EXPECT_EQ(r.tokens[p], "[MASK]");
      EXPECT_EQ(render(schema, inst, orientation).tokens, r.tokens);
    }
  }
}

TEST(SchemaJson, RoundTrip) {
  for (const auto& spec : valid_specs()) {
    const auto schema = compile(spec);
    const auto doc = schema_to_json(schema);
    EXPECT_EQ(schema_from_json(doc), schema);
    EXPECT_EQ(schema_to_json(schema_from_json(nlohmann::ordered_json::parse(doc.dump()))).dump(), doc.dump());
  }
}

TEST(SchemaJson, RejectsMalformedDocuments) {
  const auto doc = schema_to_json(compile(bundled_spec("synthetic4.ptr")));
  EXPECT_THROW(schema_from_json(nlohmann::ordered_json::object()), DataError);
  auto bad = doc;
  bad["version"] = 99;
  EXPECT_THROW(schema_from_json(bad), DataError);
  bad = doc;
  bad["n_masks"] = 7;
  EXPECT_THROW(schema_from_json(bad), DataError);
}

TEST(Inspect, ListsEveryClass) {
  const auto schema = compile(bundled_spec("tacred.ptr"));
  const std::string text = inspect(schema);
  EXPECT_NE(text.find("[MASK]_1"), std::string::npos);
  EXPECT_NE(text.find("[MASK]_3"), std::string::npos);
  for (const auto& label : schema.class_labels()) EXPECT_NE(text.find(label), std::string::npos) << label;
}

}  // namespace
}  // namespace ptr::prompt
