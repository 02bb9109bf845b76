#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "rde/corpus.hpp"
#include "rde/error.hpp"
#include "support.hpp"

namespace rde {
namespace {

using Tokens = std::vector<std::string>;

Vocabulary ab_vocab() { return Vocabulary({{"a", 2}, {"b", 1}}, FeatureKind::unigram, 1); }

TEST(Tokenize, Unigrams) { EXPECT_EQ(tokenize("The cat sat", FeatureKind::unigram), (Tokens{"the", "cat", "sat"})); }

TEST(Tokenize, SingleBigram) { EXPECT_EQ(tokenize("a b", FeatureKind::bigram), (Tokens{"a_b"})); }

TEST(Tokenize, EmptyInput) { EXPECT_TRUE(tokenize("", FeatureKind::both).empty()); }

TEST(Tokenize, BothEmitsUnigramsThenBigrams) {
  EXPECT_EQ(tokenize("x  Y\tz", FeatureKind::both), (Tokens{"x", "y", "z", "x_y", "y_z"}));
}

TEST(Tokenize, SingleTokenHasNoBigram) { EXPECT_TRUE(tokenize("lonely", FeatureKind::bigram).empty()); }

TEST(BuildVocabulary, MinCountFilters) {
  std::vector<Tokens> docs{{"a", "b"}, {"a"}};
  auto v = build_vocabulary(docs, FeatureKind::unigram, 2);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.lookup("a"), FeatureId{0});
  EXPECT_FALSE(v.lookup("b"));
}

TEST(BuildVocabulary, Singleton) {
  std::vector<Tokens> docs{{"a"}};
  auto v = build_vocabulary(docs, FeatureKind::unigram, 1);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v.lookup("a"), FeatureId{0});
}

TEST(BuildVocabulary, EmptyCorpus) {
  EXPECT_TRUE(build_vocabulary(std::vector<Tokens>{}, FeatureKind::unigram, 1).empty());
}

TEST(BuildVocabulary, DocumentFrequencyNotTermFrequency) {
  std::vector<Tokens> docs{{"b", "b", "b"}, {"a"}, {"a"}};
  auto v = build_vocabulary(docs, FeatureKind::unigram, 1);
  EXPECT_EQ(v.token(0), "a");
  EXPECT_EQ(v.doc_count(1), 1);
}

TEST(BuildVocabulary, TiesBrokenLexicographically) {
  std::vector<Tokens> docs{{"zeta", "alpha", "mid"}};
  auto v = build_vocabulary(docs, FeatureKind::unigram, 1);
  EXPECT_EQ(v.token(0), "alpha");
  EXPECT_EQ(v.token(1), "mid");
  EXPECT_EQ(v.token(2), "zeta");
}

TEST(BuildVocabulary, DeterministicAcrossInputOrder) {
  std::vector<Tokens> docs{{"c", "a"}, {"b", "a"}, {"c"}};
  std::vector<Tokens> reversed(docs.rbegin(), docs.rend());
  auto v1 = build_vocabulary(docs, FeatureKind::unigram, 1);
  auto v2 = build_vocabulary(reversed, FeatureKind::unigram, 1);
  ASSERT_EQ(v1.size(), v2.size());
  for (FeatureId id = 0; id < v1.size(); ++id) EXPECT_EQ(v1.token(id), v2.token(id));
}

TEST(Vocabulary, RejectsDuplicates) {
  EXPECT_THROW(Vocabulary({{"a", 1}, {"a", 1}}, FeatureKind::unigram, 1), InvalidArgument);
}

TEST(Vocabulary, FileRoundTrip) {
  std::vector<Tokens> docs{{"x", "y_z"}, {"x"}};
  auto v = build_vocabulary(docs, FeatureKind::both, 1);
  std::stringstream ss;
  write_vocabulary(ss, v, "kind=both");
  auto back = read_vocabulary(ss);
  ASSERT_EQ(back.size(), v.size());
  EXPECT_EQ(back.kind(), FeatureKind::both);
  EXPECT_EQ(back.min_count(), 1);
  for (FeatureId id = 0; id < v.size(); ++id) {
    EXPECT_EQ(back.token(id), v.token(id));
    EXPECT_EQ(back.doc_count(id), v.doc_count(id));
  }
}

TEST(Vectorize, DeduplicatesOccurrences) {
  Tokens t{"a", "a", "b"};
  EXPECT_EQ(vectorize(t, ab_vocab()), SparseExample::from_ids({0, 1}));
}

TEST(Vectorize, AllOutOfVocabulary) {
  Tokens t{"z"};
  EXPECT_TRUE(vectorize(t, Vocabulary({{"a", 1}}, FeatureKind::unigram, 1)).empty());
}

TEST(Vectorize, SortedOutput) {
  Tokens t{"b", "a"};
  auto x = vectorize(t, ab_vocab());
  ASSERT_EQ(x.size(), 2u);
  EXPECT_EQ(x.ids()[0], 0u);
  EXPECT_EQ(x.ids()[1], 1u);
}

TEST(VectorizeProperty, IdempotentUnderDuplication) {
  Rng rng(11);
  std::vector<Vocabulary::Entry> entries;
  for (int i = 0; i < 30; ++i) entries.push_back({"t" + std::to_string(i), 1});
  Vocabulary v(entries, FeatureKind::unigram, 1);
  for (int trial = 0; trial < 200; ++trial) {
    Tokens t;
    const auto len = rng.below(12);
    for (std::uint64_t i = 0; i < len; ++i) t.push_back("t" + std::to_string(rng.below(40)));
    Tokens doubled = t;
    doubled.insert(doubled.end(), t.begin(), t.end());
    EXPECT_EQ(vectorize(doubled, v), vectorize(t, v));
  }
}

TEST(VectorizeProperty, IdsMapBackToTokens) {
  Rng rng(12);
  std::vector<Vocabulary::Entry> entries;
  for (int i = 0; i < 30; ++i) entries.push_back({"w" + std::to_string(i), 1});
  Vocabulary v(entries, FeatureKind::unigram, 1);
  for (int trial = 0; trial < 200; ++trial) {
    std::set<std::string> s;
    const auto len = rng.below(10);
    for (std::uint64_t i = 0; i < len; ++i) s.insert("w" + std::to_string(rng.below(30)));
    Tokens t(s.begin(), s.end());
    std::set<std::string> back;
    const auto x = vectorize(t, v);
    for (auto id : x.ids()) back.insert(v.token(id));
    EXPECT_EQ(back, s);
  }
}

TEST(LoadDataset, PositiveLine) {
  std::istringstream in("pos\ta b\n");
  auto d = load_dataset(in, ab_vocab());
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.labels[0], Label::pos);
  EXPECT_EQ(d.examples[0], SparseExample::from_ids({0, 1}));
}

TEST(LoadDataset, QuestionMarkIsUnlabeled) {
  std::istringstream in("?\tcat\n");
  auto d = load_dataset(in, ab_vocab());
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.labels[0], Label::unlabeled);
  EXPECT_TRUE(d.examples[0].empty());
}

TEST(LoadDataset, MissingTabReportsLine) {
  std::istringstream in("bad line\n");
  try {
    load_dataset(in, ab_vocab());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(LoadDataset, UnknownLabelReportsLine) {
  std::istringstream in("pos\ta\nmaybe\tb\n");
  try {
    load_dataset(in, ab_vocab());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadDataset, SkipsHeaderAndBlankLines) {
  std::istringstream in("#rde corpus v1\n#config n=2\n\nneg\tb\npos\tA\n");
  auto d = load_dataset(in, ab_vocab());
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d.labels[0], Label::neg);
  EXPECT_EQ(d.examples[1], SparseExample::from_ids({0}));
}

TEST(Dataset, SubsetAndCounts) {
  auto d = test::make_dataset(3, {{0}, {1}, {2}}, {Label::pos, Label::neg, Label::pos});
  EXPECT_TRUE(d.fully_labeled());
  EXPECT_EQ(d.count(Label::pos), 2u);
  std::vector<std::size_t> idx{2, 0};
  auto s = d.subset(idx);
  EXPECT_EQ(s.examples[0], SparseExample::from_ids({2}));
  EXPECT_EQ(s.labels[1], Label::pos);
}

TEST(Dataset, ValidateRejectsOutOfRangeIds) {
  auto d = test::make_dataset(2, {{5}});
  EXPECT_THROW(d.validate(), InvalidArgument);
}

}  // namespace
}  // namespace rde
