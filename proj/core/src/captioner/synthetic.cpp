#include "depthcap/captioner/synthetic.hpp"

#include "depthcap/errors.hpp"
#include "depthcap/numerics/params.hpp"

namespace depthcap::cap {

namespace {

std::string random_word(num::SplitMix64& rng) {
  const std::size_t len = 3 + rng.below(4);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += static_cast<char>('a' + rng.below(26));
  return w;
}

ingest::Box random_box(num::SplitMix64& rng, std::size_t width, std::size_t height) {
  const double x0 = rng.uniform(0.0, static_cast<double>(width) - 2.0);
  const double y0 = rng.uniform(0.0, static_cast<double>(height) - 2.0);
  const double x1 = rng.uniform(x0 + 1.0, static_cast<double>(width));
  const double y1 = rng.uniform(y0 + 1.0, static_cast<double>(height));
  return {x0, y0, x1, y1};
}

std::vector<double> random_vector(num::SplitMix64& rng, std::size_t n, double sd) {
  std::vector<double> v(n);
  for (auto& x : v) x = sd * rng.normal();
  return v;
}

}  // namespace

SyntheticScene random_scene(std::uint64_t seed, const SceneShape& shape) {
  if (shape.objects == 0 || shape.ocr == 0) throw ArgumentError("random_scene: need at least one object and one OCR token");
  if (shape.width < 3 || shape.height < 3) throw ArgumentError("random_scene: image too small");
  num::SplitMix64 rng(seed);
  SyntheticScene s;
  auto& r = s.record;
  r.id = "synthetic-" + std::to_string(seed);
  r.width = shape.width;
  r.height = shape.height;
  r.depth_map = "unused.pgm";
  for (std::size_t i = 0; i < shape.objects; ++i) {
    r.objects.push_back({random_box(rng, shape.width, shape.height), random_vector(rng, shape.appearance_dim, 1.0)});
  }
  auto add_word = [&](std::string word) {
    while (s.table.contains(word)) word += static_cast<char>('a' + rng.below(26));
    s.table.insert(word, random_vector(rng, s.table.dim(), 0.2));
    return word;
  };
  for (std::size_t i = 0; i < shape.ocr; ++i) {
    ingest::OcrDetection d;
    d.token = add_word(random_word(rng));
    d.box = random_box(rng, shape.width, shape.height);
    d.feat = random_vector(rng, shape.appearance_dim, 1.0);
    d.conf = rng.uniform(0.5, 1.0);
    r.ocr.push_back(std::move(d));
  }
  for (std::size_t i = 0; i < shape.concepts; ++i) {
    r.concepts.push_back({add_word(random_word(rng)), rng.uniform(0.1, 0.4)});
  }
  r.captions.push_back(r.ocr.front().token);

  s.depth.width = shape.width;
  s.depth.height = shape.height;
  s.depth.values.resize(shape.width * shape.height);
  for (auto& v : s.depth.values) v = static_cast<std::uint8_t>(rng.below(256));

  s.scene = prepare_scene(r, s.depth, s.table, std::max<std::size_t>(shape.concepts, 1), false);
  return s;
}

ingest::Vocabulary synthetic_vocabulary(std::size_t size) {
  if (size < ingest::Vocabulary::kReservedCount) throw ArgumentError("synthetic_vocabulary: size below the reserved count");
  std::vector<std::string> words;
  for (std::size_t i = ingest::Vocabulary::kReservedCount; i < size; ++i) words.push_back("w" + std::to_string(i));
  return ingest::Vocabulary::from_ordinary_words(words);
}

ModelConfig micro_config() {
  ModelConfig c;
  c.t = 16;
  c.heads = 2;
  c.mmt_layers = 1;
  c.defum_layers = 1;
  c.defum_heads = 1;
  c.depth_heads = 1;
  c.K = 2;
  c.max_len = 8;
  c.appearance_dim = 8;
  c.lr = 1e-3;
  c.steps = 10;
  c.batch_size = 1;
  return c;
}

}  // namespace depthcap::cap
