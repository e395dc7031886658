// Copyright 2026 The Rulewise Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rulewise/predicate.h"

#include <gtest/gtest.h>

#include "rulewise/error.h"
#include "rulewise/synthgen.h"
#include "test_util.h"

namespace rulewise {
namespace {

using testing::SentenceBuilder;

DictionarySet Dicts() {
  DictionarySet d;
  d.Add("parties", {"buyer", "seller"});
  d.Add("goods", {"widgets"});
  d.Add("verbs", {"deliver", "pay"});
  return d;
}

// "The Buyer shall pay the Seller and the Seller delivered widgets"
Sentence TwoFrames() {
  return SentenceBuilder(1, "The Buyer shall pay the Seller and the Seller delivered widgets", 1)
      .Frame("pay")
      .Prop("modalclass", "shall")
      .Prop("tense", "future")
      .Arg("agent", 0, 2)
      .Arg("beneficiary", 4, 6)
      .Frame("deliver")
      .Prop("tense", "past")
      .Arg("agent", 7, 9)
      .Arg("theme", 10, 11)
      .Build();
}

TEST(PredicateKeyTest, ParseAndDisplayRoundTrip) {
  for (const std::string name :
       {"prop:tense=past", "dict:agent@parties", "dict:action_lemma@verbs",
        "dict:context:temporal@times"}) {
    EXPECT_EQ(PredicateKey::Parse(name).DisplayName(), name);
  }
  PredicateKey k = PredicateKey::Parse("dict:context:locative@places");
  EXPECT_EQ(k.kind, PredicateKind::kDictionaryMatch);
  EXPECT_EQ(k.role(), "context:locative");
  EXPECT_EQ(k.dictionary_name(), "places");
}

TEST(PredicateKeyTest, ParseRejectsMalformed) {
  for (const std::string bad : {"", "tense=past", "prop:tense", "prop:colour=red",
                                "dict:agent", "dict:patient@x", "prop:tense=",
                                "dict:agent@", "prop:=x"}) {
    EXPECT_THROW(PredicateKey::Parse(bad), Error) << bad;
  }
}

TEST(PredicateTest, PropertyMatchesAnyFrame) {
  const Sentence s = TwoFrames();
  const DictionarySet d = Dicts();
  EXPECT_TRUE(EvaluatePredicate(PredicateKey::Property("tense", "past"), s, d));
  EXPECT_TRUE(EvaluatePredicate(PredicateKey::Property("tense", "future"), s, d));
  EXPECT_FALSE(EvaluatePredicate(PredicateKey::Property("tense", "present"), s, d));
  EXPECT_FALSE(EvaluatePredicate(PredicateKey::Property("voice", "passive"), s, d));
}

TEST(PredicateTest, DictionaryMatchesSpanTokensCaseInsensitively) {
  const Sentence s = TwoFrames();
  const DictionarySet d = Dicts();
  // "The Buyer" is not an entry, but its token "Buyer" is.
  EXPECT_TRUE(EvaluatePredicate(PredicateKey::DictionaryMatch("agent", "parties"), s, d));
  EXPECT_TRUE(EvaluatePredicate(PredicateKey::DictionaryMatch("theme", "goods"), s, d));
  EXPECT_FALSE(EvaluatePredicate(PredicateKey::DictionaryMatch("theme", "parties"), s, d));
  EXPECT_FALSE(EvaluatePredicate(PredicateKey::DictionaryMatch("object", "goods"), s, d));
  EXPECT_TRUE(
      EvaluatePredicate(PredicateKey::DictionaryMatch("action_lemma", "verbs"), s, d));
  EXPECT_THROW(
      EvaluatePredicate(PredicateKey::DictionaryMatch("agent", "nope"), s, d), Error);
}

TEST(PredicateTest, FrameScopedNotSentenceScoped) {
  // The role lives in frame 0 and the dictionary word in frame 1.
  Sentence s = SentenceBuilder(1, "widgets arrive and buyer pays", 1)
                   .Frame("arrive")
                   .Arg("theme", 0, 1)
                   .Frame("pay")
                   .Arg("agent", 3, 4)
                   .Build();
  EXPECT_FALSE(EvaluatePredicate(PredicateKey::DictionaryMatch("theme", "parties"), s, Dicts()));
}

TEST(PredicateTest, FramelessSentenceMatchesNothing) {
  Sentence s = SentenceBuilder(1, "Article 5", 0).Build();
  EXPECT_FALSE(EvaluatePredicate(PredicateKey::Property("tense", "past"), s, Dicts()));
  EXPECT_FALSE(EvaluatePredicate(PredicateKey::DictionaryMatch("agent", "parties"), s, Dicts()));
}

TEST(PredicateTest, SitesLocateSpansAndActions) {
  const Sentence s = TwoFrames();
  const DictionarySet d = Dicts();
  auto agent = FindPredicateSites(PredicateKey::DictionaryMatch("agent", "parties"), 3, s, d);
  ASSERT_EQ(agent.size(), 2u);
  EXPECT_EQ(agent[0], (Highlight{3, 0, 0, 2}));
  EXPECT_EQ(agent[1], (Highlight{3, 1, 7, 9}));
  // "pay" is found as an exact token, "deliver" by prefix against "delivered".
  auto tense = FindPredicateSites(PredicateKey::Property("tense", "future"), 1, s, d);
  ASSERT_EQ(tense.size(), 1u);
  EXPECT_EQ(tense[0], (Highlight{1, 0, 3, 4}));
  auto past = FindPredicateSites(PredicateKey::Property("tense", "past"), 2, s, d);
  ASSERT_EQ(past.size(), 1u);
  EXPECT_EQ(past[0], (Highlight{2, 1, 9, 10}));
  EXPECT_TRUE(FindPredicateSites(PredicateKey::Property("tense", "present"), 0, s, d).empty());
}

TEST(PredicateTest, ActionSpanWinsAndUnlocatableIsMinusOne) {
  Sentence s = SentenceBuilder(1, "x y z", 1).Frame("q").Prop("tense", "past").Build();
  auto sites = FindPredicateSites(PredicateKey::Property("tense", "past"), 0, s, Dicts());
  ASSERT_EQ(sites.size(), 1u);
  EXPECT_EQ(sites[0].token_start, -1);
  EXPECT_EQ(sites[0].token_end, -1);
  s.frames[0].action_span = ArgumentSpan{"y", 1, 2};
  sites = FindPredicateSites(PredicateKey::Property("tense", "past"), 0, s, Dicts());
  EXPECT_EQ(sites[0], (Highlight{0, 0, 1, 2}));
}

TEST(CatalogTest, SupportFilterAndOrder) {
  std::vector<Sentence> sentences;
  for (int i = 0; i < 6; ++i) {
    auto b = SentenceBuilder(i, "buyer pays", i % 2);
    b.Frame("pay").Prop("tense", i < 5 ? "past" : "future").Arg("agent", 0, 1);
    sentences.push_back(b.Build());
  }
  Corpus corpus = Corpus::FromSentences(sentences);
  CatalogConfig config;
  config.min_support = 5;
  PredicateCatalog catalog = BuildCatalog(corpus, Dicts(), config);
  std::vector<std::string> names;
  for (const auto &p : catalog.predicates()) names.push_back(p.display_name);
  EXPECT_EQ(names, (std::vector<std::string>{"prop:tense=past", "dict:action_lemma@verbs",
                                               "dict:agent@parties"}));
  EXPECT_EQ(catalog.Find("prop:tense=past"), 0);
  EXPECT_FALSE(catalog.Find("prop:tense=future").has_value());
  for (size_t i = 0; i < catalog.size(); ++i) EXPECT_EQ(catalog.at(i).id, static_cast<int>(i));

  config.min_support = 1;
  catalog = BuildCatalog(corpus, Dicts(), config);
  EXPECT_TRUE(catalog.Find("prop:tense=future").has_value());
}

TEST(CatalogTest, InternDeduplicates) {
  PredicateCatalog c;
  EXPECT_EQ(c.Intern(PredicateKey::Property("tense", "past")), 0);
  EXPECT_EQ(c.Intern(PredicateKey::Property("voice", "active")), 1);
  EXPECT_EQ(c.Intern(PredicateKey::Property("tense", "past")), 0);
  EXPECT_EQ(c.size(), 2u);
}

// Property: the bitset index agrees with per-sentence oracle semantics.
TEST(MatchIndexTest, AgreesWithOracleOnSyntheticCorpora) {
  for (uint64_t seed = 1; seed <= 4; ++seed) {
    SynthConfig config = testing::SmallSynthConfig(seed, 300);
    config.two_frame_rate = 0.4;
    SynthData data = GenerateSynthetic(config);
    auto ws = testing::SynthWorkspace(data);
    const MatchIndex &index = ws->index();
    ASSERT_EQ(index.num_predicates(), ws->catalog().size());
    for (const auto &p : ws->catalog().predicates()) {
      for (const auto &s : ws->corpus().sentences()) {
        ASSERT_EQ(index.matches(p.id).Test(s.id),
                  testing::OraclePredicate(p.key, s, ws->dictionaries()))
            << p.display_name << " sentence " << s.id;
      }
    }
    EXPECT_EQ(index.positives(), ws->corpus().positives());
  }
}

}  // namespace
}  // namespace rulewise
