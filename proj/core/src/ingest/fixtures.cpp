#include "depthcap/ingest/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <string>
#include <vector>

#include "depthcap/errors.hpp"
#include "depthcap/ingest/depth_map.hpp"
#include "depthcap/ingest/embedding_table.hpp"
#include "depthcap/ingest/scene.hpp"
#include "depthcap/ingest/vocabulary.hpp"
#include "depthcap/numerics/params.hpp"

namespace depthcap::ingest {
namespace {

using num::SplitMix64;

// Words every caption template relies on; always at the front of the vocabulary.
const std::vector<std::string> kTemplateWords = {"a",  "the",     "that", "says", "with", "word",
                                                 "on", "it",      "is",   "written", "and"};
const std::vector<std::string> kNouns = {"sign",   "bottle", "shirt",  "car",    "book",   "store",
                                         "wall",   "box",    "poster", "bus",    "cup",    "phone",
                                         "screen", "board",  "truck",  "door",   "banner", "jersey",
                                         "clock",  "laptop", "package", "window", "can",   "building"};
const std::vector<std::string> kAdjectives = {"red",   "blue",  "green", "white", "black",
                                              "yellow", "large", "small", "old",   "new"};
const std::vector<std::string> kOcrWords = {"sale", "open", "stop", "exit",  "coffee",
                                            "news", "free", "hotel", "welcome", "bar"};

struct Lexicon {
  Vocabulary vocab;
  std::vector<std::string> nouns;
  std::vector<std::string> adjectives;
  std::vector<std::string> ocr_words;
};

Lexicon build_lexicon(std::size_t vocab_size) {
  if (vocab_size < kMinFixtureVocab) {
    throw ArgumentError("fixture vocabulary must have at least " + std::to_string(kMinFixtureVocab) +
                        " words");
  }
  const std::size_t ordinary = vocab_size - Vocabulary::kReservedCount;
  std::vector<std::string> words = kTemplateWords;
  Lexicon lex;
  // Interleave the categories so small vocabularies still get some of each.
  const std::size_t longest = std::max({kNouns.size(), kAdjectives.size(), kOcrWords.size()});
  for (std::size_t i = 0; i < longest && words.size() < ordinary; ++i) {
    for (int pick = 0; pick < 4 && words.size() < ordinary; ++pick) {
      if (pick < 2) {
        const std::size_t k = 2 * i + static_cast<std::size_t>(pick);
        if (k < kNouns.size()) {
          words.push_back(kNouns[k]);
          lex.nouns.push_back(kNouns[k]);
        }
      } else if (pick == 2 && i < kAdjectives.size()) {
        words.push_back(kAdjectives[i]);
        lex.adjectives.push_back(kAdjectives[i]);
      } else if (pick == 3 && i < kOcrWords.size()) {
        words.push_back(kOcrWords[i]);
        lex.ocr_words.push_back(kOcrWords[i]);
      }
    }
  }
  for (std::size_t k = 0; words.size() < ordinary; ++k) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "term%03zu", k);
    words.emplace_back(buf);
  }
  lex.vocab = Vocabulary::from_ordinary_words(words);
  return lex;
}

// Rounds to `decimals` places so the value prints compactly.
double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

std::string make_oov(SplitMix64& rng, const Vocabulary& vocab, const std::set<std::string>& taken) {
  static const char* kConsonants = "bcdfgklmnprstvz";
  static const char* kVowels = "aeiou";
  for (;;) {
    std::string s;
    const std::size_t syllables = 2 + rng.below(2);
    for (std::size_t i = 0; i < syllables; ++i) {
      s += kConsonants[rng.below(15)];
      s += kVowels[rng.below(5)];
    }
    if (rng.below(2) == 1) s += kConsonants[rng.below(15)];
    if (!vocab.index_of(s) && !taken.contains(s)) return s;
  }
}

Box random_box(SplitMix64& rng, double x0, double y0, double x1, double y1, double min_w, double min_h) {
  const double w = std::max(min_w, std::floor(rng.uniform(min_w, std::max(min_w, x1 - x0))));
  const double h = std::max(min_h, std::floor(rng.uniform(min_h, std::max(min_h, y1 - y0))));
  const double x = x0 + std::floor(rng.uniform(0.0, std::max(0.0, x1 - x0 - w) + 1.0));
  const double y = y0 + std::floor(rng.uniform(0.0, std::max(0.0, y1 - y0 - h) + 1.0));
  return {x, y, std::min(x + w, x1), std::min(y + h, y1)};
}

std::vector<double> random_feature(SplitMix64& rng, std::size_t dim) {
  std::vector<double> f(dim);
  for (double& v : f) v = round_to(rng.normal(), 5);
  return f;
}

void paint(DepthMap& map, const Box& b, std::uint8_t value) {
  for (auto y = static_cast<std::size_t>(b.y_tl); y < static_cast<std::size_t>(b.y_br); ++y)
    for (auto x = static_cast<std::size_t>(b.x_tl); x < static_cast<std::size_t>(b.x_br); ++x)
      map.values[y * map.width + x] = value;
}

std::string pick(SplitMix64& rng, const std::vector<std::string>& from) {
  return from[rng.below(from.size())];
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

void gen_fixtures(std::uint64_t seed, std::int64_t n_images, const FixtureConfig& config,
                  const std::filesystem::path& out_dir) {
  if (n_images <= 0) throw ArgumentError("gen_fixtures: n_images must be positive");
  if (config.feature_dim == 0 || config.subword_dim == 0) throw ArgumentError("gen_fixtures: zero dimension");
  if (config.min_objects == 0 || config.min_objects > config.max_objects || config.max_objects > kMaxObjects) {
    throw ArgumentError("gen_fixtures: bad object count range");
  }
  if (config.min_ocr == 0 || config.min_ocr > config.max_ocr || config.max_ocr > kMaxOcrTokens) {
    throw ArgumentError("gen_fixtures: bad OCR count range");
  }
  if (config.concept_candidates > kMaxConceptCandidates) {
    throw ArgumentError("gen_fixtures: at most 15 concept candidates");
  }
  if (config.image_width < 16 || config.image_height < 16) throw ArgumentError("gen_fixtures: image too small");

  const Lexicon lex = build_lexicon(config.vocab_size);
  SplitMix64 rng(seed);

  std::filesystem::create_directories(out_dir / kDepthDir);
  std::vector<SceneRecord> records;
  std::vector<std::string> oov_order;
  std::set<std::string> oov_seen;
  const auto W = static_cast<double>(config.image_width);
  const auto H = static_cast<double>(config.image_height);

  for (std::int64_t img = 0; img < n_images; ++img) {
    char id_buf[32];
    std::snprintf(id_buf, sizeof id_buf, "img%04lld", static_cast<long long>(img));
    SceneRecord rec;
    rec.id = id_buf;
    rec.width = config.image_width;
    rec.height = config.image_height;
    rec.depth_map = std::string(kDepthDir) + "/" + rec.id + ".pgm";

    DepthMap depth{config.image_width, config.image_height,
                   std::vector<std::uint8_t>(config.image_width * config.image_height,
                                             static_cast<std::uint8_t>(160 + rng.below(96)))};

    const std::size_t n_obj = config.min_objects + rng.below(config.max_objects - config.min_objects + 1);
    std::vector<std::string> obj_nouns;
    std::vector<std::uint8_t> obj_depth;
    for (std::size_t i = 0; i < n_obj; ++i) {
      ObjectDetection obj{random_box(rng, 0, 0, W, H, 12, 10), random_feature(rng, config.feature_dim)};
      const auto dv = static_cast<std::uint8_t>(20 + rng.below(131));
      paint(depth, obj.box, dv);
      obj_depth.push_back(dv);
      obj_nouns.push_back(pick(rng, lex.nouns));
      rec.objects.push_back(std::move(obj));
    }

    // OCR tokens: the first is always out-of-vocabulary; later ones mix
    // further OOV strings with in-vocabulary scene words.
    const std::size_t n_ocr = config.min_ocr + rng.below(config.max_ocr - config.min_ocr + 1);
    std::set<std::string> record_tokens;
    std::vector<std::size_t> ocr_host;
    for (std::size_t i = 0; i < n_ocr; ++i) {
      std::string token;
      if (i == 0 || rng.below(2) == 0 || lex.ocr_words.empty()) {
        token = make_oov(rng, lex.vocab, record_tokens);
      } else {
        token = pick(rng, lex.ocr_words);
        if (record_tokens.contains(token)) token = make_oov(rng, lex.vocab, record_tokens);
      }
      record_tokens.insert(token);
      const std::size_t host = rng.below(n_obj);
      const Box& hb = rec.objects[host].box;
      OcrDetection det;
      det.token = token;
      det.box = random_box(rng, hb.x_tl, hb.y_tl, hb.x_br, hb.y_br, 3, 2);
      det.feat = random_feature(rng, config.feature_dim);
      det.conf = rng.below(4) == 0 ? kDefaultOcrConfidence : round_to(rng.uniform(0.5, 1.0), 4);
      const auto base = static_cast<int>(obj_depth[host]);
      paint(depth, det.box, static_cast<std::uint8_t>(std::max(0, base - static_cast<int>(rng.below(11)))));
      ocr_host.push_back(host);
      if (!lex.vocab.index_of(token) && oov_seen.insert(token).second) oov_order.push_back(token);
      rec.ocr.push_back(std::move(det));
    }

    const std::string& oov = rec.ocr.front().token;
    const std::string& noun = obj_nouns[ocr_host.front()];
    const std::string adj = lex.adjectives.empty() ? "a" : pick(rng, lex.adjectives);
    const std::string& second = rec.ocr.size() > 1 ? rec.ocr[1].token : oov;
    std::vector<std::string> caption;
    switch (rng.below(5)) {
      case 0: caption = {"a", noun, "that", "says", oov}; break;
      case 1: caption = {"a", adj, noun, "with", "the", "word", oov, "on", "it"}; break;
      case 2: caption = {"the", noun, "says", oov, second}; break;
      case 3: caption = {oov, "is", "written", "on", "a", adj, noun}; break;
      default: caption = {"a", noun, "with", oov, "and", second, "on", "it"}; break;
    }
    rec.captions.push_back(join(caption));

    // Concept candidates: object nouns score high, distractors lower.
    std::set<std::string> concept_words;
    for (std::size_t i = 0; i < n_obj && rec.concepts.size() < config.concept_candidates; ++i) {
      if (concept_words.insert(obj_nouns[i]).second) {
        rec.concepts.push_back({obj_nouns[i], round_to(rng.uniform(0.6, 1.0), 4)});
      }
    }
    std::size_t guard = 0;
    while (rec.concepts.size() < config.concept_candidates && guard++ < 1000) {
      const std::string w = rng.below(3) == 0 && !lex.adjectives.empty() ? pick(rng, lex.adjectives)
                                                                         : pick(rng, lex.nouns);
      if (concept_words.insert(w).second) rec.concepts.push_back({w, round_to(rng.uniform(0.0, 0.6), 4)});
    }

    save_depth_map(out_dir / rec.depth_map, depth);
    validate(rec);
    records.push_back(std::move(rec));
  }

  save_scene_records(out_dir / kRecordsFile, records);

  {
    std::ofstream refs(out_dir / kReferencesFile, std::ios::binary | std::ios::trunc);
    if (!refs) throw ArgumentError("cannot write references in '" + out_dir.string() + "'");
    for (const auto& r : records) {
      nlohmann::ordered_json j;
      j["id"] = r.id;
      j["captions"] = r.captions;
      refs << j.dump() << '\n';
    }
  }

  save_vocabulary(out_dir / kVocabularyFile, lex.vocab);

  EmbeddingTable table(config.subword_dim);
  auto add_word = [&](const std::string& w) {
    if (table.contains(w)) return;
    SplitMix64 wrng(num::derive_seed(seed, "embedding:" + w));
    std::vector<double> v(config.subword_dim);
    for (double& x : v) x = round_to(0.3 * wrng.normal(), 5);
    table.insert(w, std::move(v));
  };
  for (std::size_t i = Vocabulary::kReservedCount; i < lex.vocab.size(); ++i) add_word(lex.vocab.word(i));
  for (const auto& w : oov_order) add_word(w);
  save_embedding_table(out_dir / kEmbeddingsFile, table);
}

}  // namespace depthcap::ingest
