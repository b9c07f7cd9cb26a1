#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "depthcap/errors.hpp"
#include "depthcap/eval/corpus_io.hpp"
#include "depthcap/eval/metrics.hpp"
#include "depthcap/eval/tokenize.hpp"
#include "oracles.hpp"

using namespace depthcap;
using namespace depthcap::eval;

namespace {

Tokens words(const std::string& s) { return tokenize(s); }

}  // namespace

TEST(Tokenize, LowercasesAndDeletesPunctuation) {
  EXPECT_EQ(tokenize("A Sign, reading: STOP!"), (Tokens{"a", "sign", "reading", "stop"}));
  EXPECT_EQ(tokenize("don't  \t 7-Eleven"), (Tokens{"dont", "7eleven"}));
  EXPECT_TRUE(tokenize(" ... ").empty());
  EXPECT_EQ(tokenize("caf\xc3\xa9"), (Tokens{"caf\xc3\xa9"}));
  EXPECT_EQ(normalize_surface("Coca-Cola"), "cocacola");
  EXPECT_EQ(normalize_surface("New York"), "new york");
  EXPECT_EQ(join_tokens({"a", "b"}), "a b");
}

TEST(Bleu, Examples) {
  Corpus c;
  c["x"] = {words("the cat sat on the mat"), {words("the cat sat on the mat")}};
  EXPECT_DOUBLE_EQ(bleu4(c), 1.0);

  Corpus short_c;
  short_c["x"] = {words("the cat"), {words("the cat sat down")}};
  EXPECT_EQ(bleu4(short_c), 0.0);

  Corpus bp;
  bp["x"] = {words("a b c d"), {words("a b c d e f g h")}};
  EXPECT_NEAR(bleu4(bp), std::exp(-1.0), 1e-15);

  EXPECT_DOUBLE_EQ(brevity_penalty(2, 4), std::exp(-1.0));
  EXPECT_DOUBLE_EQ(brevity_penalty(5, 4), 1.0);
  EXPECT_EQ(brevity_penalty(0, 4), 0.0);
}

TEST(Bleu, ClipsRepeatedNgrams) {
  Corpus c;
  c["x"] = {words("the the the the"), {words("the cat the mat"), words("the the dog runs")}};
  EXPECT_EQ(bleu4(c), 0.0);
  BleuOptions smooth;
  smooth.smooth = true;
  // unigram 2/4 clipped; bigram (1+1)/(3+1); trigram (0+1)/(2+1); 4-gram (0+1)/(1+1).
  const double expected = std::exp((std::log(0.5) + std::log(0.5) + std::log(1.0 / 3.0) + std::log(0.5)) / 4.0);
  EXPECT_NEAR(bleu4(c, smooth), expected, 1e-12);
}

TEST(Bleu, ClosestReferenceLengthShorterWinsTie) {
  Corpus c;
  c["x"] = {words("a b c d e f"), {words("a b c d"), words("a b c d e f g h")}};
  // Both references are two tokens away; the shorter is used, so no penalty.
  EXPECT_DOUBLE_EQ(bleu4(c), 1.0);
}

TEST(Cider, IdentityOnDisjointImagesIsTen) {
  Corpus c;
  c["a"] = {words("a red stop sign on a pole"), {words("a red stop sign on a pole")}};
  c["b"] = {words("two dogs run across green grass"), {words("two dogs run across green grass")}};
  EXPECT_NEAR(cider_d(c), 10.0, 1e-12);
}

TEST(Cider, NoOverlapIsZero) {
  Corpus c;
  c["a"] = {words("x y z w"), {words("a b c d")}};
  c["b"] = {words("q r s t"), {words("e f g h")}};
  EXPECT_EQ(cider_d(c), 0.0);
}

TEST(Cider, ReferenceOrderDoesNotMatter) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Corpus c = depthcap::testing::random_corpus(seed);
    const double before = cider_d(c);
    for (auto& [id, e] : c) std::reverse(e.references.begin(), e.references.end());
    EXPECT_NEAR(cider_d(c), before, 1e-12);
  }
}

TEST(Cider, SingleImageNeedsOptIn) {
  Corpus c;
  c["a"] = {words("a b c d"), {words("a b c d")}};
  EXPECT_THROW(cider_d(c), ArgumentError);
  CiderOptions opts;
  opts.idf_from_refs_only = true;
  EXPECT_EQ(cider_d(c, opts), 0.0);
}

TEST(Metrics, ValidationErrors) {
  EXPECT_THROW(bleu4({}), ArgumentError);
  Corpus c;
  c["a"] = {words("a"), {}};
  EXPECT_THROW(bleu4(c), ArgumentError);
  EXPECT_THROW(cider_d(c), ArgumentError);
}

class MetricOracle : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(MetricOracle, AgreesWithBruteForce) {
  const Corpus c = depthcap::testing::random_corpus(GetParam());
  EXPECT_NEAR(bleu4(c), depthcap::testing::oracle::bleu(c), 1e-9);
  EXPECT_NEAR(cider_d(c), depthcap::testing::oracle::cider(c, 6.0), 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Corpora, MetricOracle, ::testing::Range<std::uint64_t>(0, 20));

TEST(CorpusIo, ParsesBothForms) {
  std::istringstream in(R"({"id": "a", "caption": "Hello there"}

{"id": "b", "captions": ["one", "two"]}
)");
  const auto t = parse_caption_jsonl(in);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.at("a"), std::vector<std::string>{"Hello there"});
  EXPECT_EQ(t.at("b"), (std::vector<std::string>{"one", "two"}));
}

TEST(CorpusIo, ParseErrorsCarryLineNumbers) {
  auto message = [](const std::string& text) {
    std::istringstream in(text);
    try {
      parse_caption_jsonl(in);
    } catch (const ParseError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("{\"id\": \"a\", \"caption\": \"x\"}\n{oops\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("{\"caption\": \"x\"}\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("{\"id\": \"a\", \"caption\": 3}\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("{\"id\": \"a\", \"caption\": \"x\"}\n{\"id\": \"a\", \"caption\": \"y\"}\n").find("line 2"),
            std::string::npos);
}

TEST(CorpusIo, BuildCorpusValidatesIds) {
  const CaptionTable refs{{"a", {"A cat.", "a small cat"}}, {"b", {"a dog"}}};
  const Corpus c = build_corpus({{"a", {"A cat!"}}, {"b", {"dog"}}}, refs);
  EXPECT_EQ(c.at("a").candidate, (Tokens{"a", "cat"}));
  EXPECT_EQ(c.at("a").references.size(), 2u);
  EXPECT_THROW(build_corpus({{"a", {"x"}}}, refs), ValidationError);
  EXPECT_THROW(build_corpus({{"a", {"x"}}, {"b", {"y"}}, {"c", {"z"}}}, refs), ValidationError);
  EXPECT_THROW(build_corpus({{"a", {"x", "y"}}, {"b", {"y"}}}, refs), ValidationError);
}

TEST(CorpusIo, MissingFileIsReported) {
  EXPECT_THROW(load_caption_jsonl("/nonexistent/preds.jsonl"), Error);
}
