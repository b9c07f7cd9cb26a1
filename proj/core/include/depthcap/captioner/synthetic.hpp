#pragma once

#include <cstddef>
#include <cstdint>

#include "depthcap/captioner/config.hpp"
#include "depthcap/captioner/prepare.hpp"
#include "depthcap/ingest/vocabulary.hpp"

namespace depthcap::cap {

// Random scenes for property tests, gradient checks and benchmarks.
struct SceneShape {
  std::size_t objects = 1;
  std::size_t ocr = 3;
  std::size_t concepts = 2;
  std::size_t appearance_dim = 8;
  std::size_t width = 32;
  std::size_t height = 24;
};

struct SyntheticScene {
  ingest::SceneRecord record;
  ingest::DepthMap depth;
  ingest::EmbeddingTable table;
  PreparedScene scene;
};

// A record with random boxes, features, lowercase OCR strings and concept
// words, a random depth map, and a table covering every word; prepared with
// top-K = shape.concepts.
SyntheticScene random_scene(std::uint64_t seed, const SceneShape& shape);

// <pad> <s> </s> <unk> followed by w4, w5, ...
ingest::Vocabulary synthetic_vocabulary(std::size_t size);

// t=16, one layer everywhere, K=2, d=8.
ModelConfig micro_config();

}  // namespace depthcap::cap
