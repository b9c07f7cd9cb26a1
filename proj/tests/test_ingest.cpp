#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "depthcap/errors.hpp"
#include "depthcap/eval/tokenize.hpp"
#include "depthcap/ingest/depth_map.hpp"
#include "depthcap/ingest/embedding_table.hpp"
#include "depthcap/ingest/fixtures.hpp"
#include "depthcap/ingest/scene.hpp"
#include "depthcap/ingest/vocabulary.hpp"
#include "support.hpp"

using namespace depthcap;
using namespace depthcap::ingest;
using depthcap::testing::TempDir;
using depthcap::testing::read_file;

namespace {

std::string record_line(const std::string& id, const std::string& objects_box = "[0,0,4,4]",
                        std::size_t n_ocr = 1) {
  std::string ocr;
  for (std::size_t i = 0; i < n_ocr; ++i) {
    if (i) ocr += ",";
    ocr += R"({"token":"t)" + std::to_string(i) + R"(","box":[1,1,2,2],"feat":[0.5,0.5]})";
  }
  return R"({"id":")" + id + R"(","width":8,"height":6,"objects":[{"box":)" + objects_box +
         R"(,"feat":[1,2]}],"ocr":[)" + ocr +
         R"(],"concepts":[{"word":"cat","score":0.5}],"captions":["a cat"],"depth_map":"d.pgm"})";
}

std::vector<SceneRecord> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scene_records(in);
}

}  // namespace

TEST(SceneRecords, TwoLineFile) {
  const auto records = parse(record_line("a") + "\n" + record_line("b") + "\n");
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].id, "a");
  EXPECT_EQ(records[1].objects.front().feat, (std::vector<double>{1, 2}));
  EXPECT_EQ(records[0].ocr.front().conf, kDefaultOcrConfidence);
}

TEST(SceneRecords, BlankLinesAreSkipped) {
  EXPECT_EQ(parse("\n" + record_line("a") + "\n\n").size(), 1u);
}

TEST(SceneRecords, InvertedBoxIsRejected) {
  try {
    parse(record_line("bad", "[4,0,4,4]"));
    FAIL();
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("bad"), std::string::npos);
    EXPECT_NE(what.find("objects[0].box"), std::string::npos);
  }
}

TEST(SceneRecords, BoxOutsideImageIsRejected) {
  EXPECT_THROW(parse(record_line("a", "[0,0,9,4]")), ValidationError);
  EXPECT_THROW(parse(record_line("a", "[-1,0,4,4]")), ValidationError);
}

TEST(SceneRecords, OcrLimitIsEighty) {
  EXPECT_EQ(parse(record_line("ok", "[0,0,4,4]", 80)).front().ocr.size(), 80u);
  try {
    parse(record_line("many", "[0,0,4,4]", 81));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("80"), std::string::npos) << e.what();
  }
}

TEST(SceneRecords, MalformedJsonReportsLine) {
  try {
    parse(record_line("a") + "\n{not json\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(SceneRecords, FieldErrors) {
  std::string conf = record_line("c");
  conf.replace(conf.find("\"feat\":[0.5,0.5]"), 16, "\"feat\":[0.5,0.5],\"conf\":1.5");
  EXPECT_THROW(parse(conf), ValidationError);
  std::string width = record_line("w");
  width.replace(width.find("\"feat\":[1,2]"), 12, "\"feat\":[1,2,3]");
  EXPECT_THROW(parse(width), ValidationError);
  EXPECT_THROW(parse(record_line("dup") + "\n" + record_line("dup")), ValidationError);
  EXPECT_THROW(parse(R"({"id":"x"})"), ValidationError);
}

TEST(SceneRecords, SaveLoadRoundTripIsByteIdentical) {
  TempDir dir;
  gen_fixtures(3, 4, {}, dir.path());
  const auto original = read_file(dir / kRecordsFile);
  const auto records = load_scene_records(dir / kRecordsFile);
  save_scene_records(dir / "copy.jsonl", records);
  EXPECT_EQ(read_file(dir / "copy.jsonl"), original);
  EXPECT_EQ(load_scene_records(dir / "copy.jsonl"), records);
}

TEST(DepthMapPgm, TwoByTwoRoundTrip) {
  const std::string bytes = std::string("P5\n2 2\n255\n") + std::string("\x00\xff\x80\x07", 4);
  const DepthMap m = parse_pgm(bytes);
  EXPECT_EQ(m.width, 2u);
  EXPECT_EQ(m.height, 2u);
  EXPECT_EQ(m.values, (std::vector<std::uint8_t>{0, 255, 128, 7}));
  EXPECT_EQ(m.at(1, 1), 7);
  EXPECT_EQ(encode_pgm(m), bytes);
}

TEST(DepthMapPgm, HeaderCommentsAccepted) {
  const DepthMap m = parse_pgm(std::string("P5 # depth\n1 1\n# note\n255\n") + std::string(1, '\x09'));
  EXPECT_EQ(m.values, (std::vector<std::uint8_t>{9}));
}

TEST(DepthMapPgm, Rejections) {
  EXPECT_THROW(parse_pgm("P5\n2 2\n65535\n" + std::string(8, '\0')), FormatError);
  EXPECT_THROW(parse_pgm("P2\n2 2\n255\n0 1 2 3\n"), FormatError);
  EXPECT_THROW(parse_pgm("P5\n2 2\n255\n" + std::string(3, '\0')), ParseError);
  EXPECT_THROW(parse_pgm("P5\n2 2\n255\n" + std::string(5, '\0')), ParseError);
  EXPECT_THROW(parse_pgm("P5\n0 2\n255\n"), FormatError);
  EXPECT_THROW(parse_pgm(""), FormatError);
}

TEST(DepthMapPgm, FileRoundTrip) {
  TempDir dir;
  DepthMap m{3, 2, {1, 2, 3, 4, 5, 6}};
  save_depth_map(dir / "m.pgm", m);
  EXPECT_EQ(load_depth_map(dir / "m.pgm"), m);
  EXPECT_EQ(read_file(dir / "m.pgm"), encode_pgm(m));
}

TEST(Embeddings, ThreeLines) {
  std::istringstream in("Van 1 2 3\ncar 4 5 6\nsign 7 8 9\n");
  const auto table = parse_embedding_table(in, 3);
  EXPECT_EQ(table.size(), 3u);
  ASSERT_NE(table.find("van"), nullptr);
  EXPECT_EQ(*table.find("VAN"), (std::vector<double>{1, 2, 3}));
}

TEST(Embeddings, WrongArityReportsLine) {
  std::string text = "a";
  for (int i = 0; i < 300; ++i) text += " 0.1";
  text += "\nb";
  for (int i = 0; i < 299; ++i) text += " 0.1";
  text += "\n";
  std::istringstream in(text);
  try {
    parse_embedding_table(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Embeddings, DuplicateLastWinsWithWarning) {
  std::istringstream in("a 1\nA 2\n");
  std::vector<std::string> warnings;
  const auto table = parse_embedding_table(in, 1, [&](std::string_view w) { warnings.emplace_back(w); });
  EXPECT_EQ(*table.find("a"), (std::vector<double>{2}));
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(Embeddings, MultiWordLookupIsMean) {
  EmbeddingTable t(2);
  t.insert("new", {1, 2});
  t.insert("york", {3, 6});
  EXPECT_EQ(t.lookup("New York"), (std::vector<double>{2, 4}));
  EXPECT_THROW(t.lookup("boston"), OovError);
  int warned = 0;
  EXPECT_EQ(t.lookup("new boston", true, [&](std::string_view) { ++warned; }), (std::vector<double>{0.5, 1}));
  EXPECT_EQ(warned, 1);
}

TEST(Embeddings, SaveLoadRoundTrip) {
  TempDir dir;
  EmbeddingTable t(3);
  t.insert("x", {0.1, -2.5e-7, 3.0});
  t.insert("y", {1.0 / 3.0, 0.0, -1.0});
  save_embedding_table(dir / "e.txt", t);
  const auto back = load_embedding_table(dir / "e.txt", 3);
  EXPECT_EQ(back.words(), t.words());
  EXPECT_EQ(*back.find("y"), *t.find("y"));
}

TEST(Vocab, ReservedIndicesAndLookup) {
  const auto v = Vocabulary::from_ordinary_words({"a", "sign"});
  EXPECT_EQ(v.size(), 6u);
  EXPECT_EQ(v.word(Vocabulary::kPad), "<pad>");
  EXPECT_EQ(v.word(Vocabulary::kBos), "<s>");
  EXPECT_EQ(v.word(Vocabulary::kEos), "</s>");
  EXPECT_EQ(v.word(Vocabulary::kUnk), "<unk>");
  EXPECT_EQ(v.index_of("sign"), 5u);
  EXPECT_FALSE(v.index_of("nope"));
  EXPECT_THROW(v.word(6), IndexError);
  EXPECT_THROW(Vocabulary::from_ordinary_words({"a", "a"}), ValidationError);
  EXPECT_THROW(Vocabulary(std::vector<std::string>{"a", "<s>", "</s>", "<unk>"}), ValidationError);
}

TEST(Vocab, FileRoundTripAndRejections) {
  TempDir dir;
  const auto v = Vocabulary::from_ordinary_words({"a", "b"});
  save_vocabulary(dir / "v.txt", v);
  EXPECT_EQ(load_vocabulary(dir / "v.txt"), v);
  depthcap::testing::write_file(dir / "bad.txt", "<pad>\n<s>\n</s>\n<unk>\ntwo words\n");
  EXPECT_THROW(load_vocabulary(dir / "bad.txt"), ParseError);
}

TEST(Fixtures, SameSeedIsByteIdentical) {
  TempDir a, b, c;
  gen_fixtures(11, 5, {}, a.path());
  gen_fixtures(11, 5, {}, b.path());
  gen_fixtures(12, 5, {}, c.path());
  for (const char* f : {kRecordsFile, kReferencesFile, kVocabularyFile, kEmbeddingsFile}) {
    EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
  }
  EXPECT_EQ(read_file(a / "depth/img0003.pgm"), read_file(b / "depth/img0003.pgm"));
  EXPECT_NE(read_file(a / kRecordsFile), read_file(c / kRecordsFile));
}

TEST(Fixtures, RejectsNonPositiveCount) {
  TempDir dir;
  EXPECT_THROW(gen_fixtures(1, 0, {}, dir.path()), ArgumentError);
  EXPECT_THROW(gen_fixtures(1, -3, {}, dir.path()), ArgumentError);
}

class FixtureSeeds : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(FixtureSeeds, CorpusInvariants) {
  TempDir dir;
  gen_fixtures(GetParam(), 8, {}, dir.path());
  const auto records = load_scene_records(dir / kRecordsFile);  // validates
  ASSERT_EQ(records.size(), 8u);
  const auto vocab = load_vocabulary(dir / kVocabularyFile);
  EXPECT_EQ(vocab.size(), 64u);
  const auto table = load_embedding_table(dir / kEmbeddingsFile);
  for (const auto& r : records) {
    const auto depth = load_depth_map(dir / r.depth_map);
    EXPECT_EQ(depth.width, r.width);
    EXPECT_EQ(depth.height, r.height);
    ASSERT_FALSE(r.captions.empty());
    std::set<std::string> ocr;
    for (const auto& o : r.ocr) {
      ocr.insert(eval::normalize_surface(o.token));
      EXPECT_NO_THROW(table.lookup(o.token)) << o.token;
    }
    for (const auto& c : r.concepts) EXPECT_TRUE(table.contains(c.word)) << c.word;
    for (const auto& caption : r.captions) {
      bool copy_only = false;
      for (const auto& w : eval::tokenize(caption)) {
        const auto idx = vocab.index_of(w);
        if (idx) EXPECT_LT(*idx, 64u);
        if (!idx && ocr.contains(w)) copy_only = true;
      }
      EXPECT_TRUE(copy_only) << r.id << ": " << caption;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, FixtureSeeds, ::testing::Values(0u, 1u, 7u, 99u, 123456789u));
