#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

namespace depthcap::ingest {

struct FixtureConfig {
  std::size_t vocab_size = 64;  // including the 4 reserved tokens
  std::size_t feature_dim = 16;
  std::size_t min_objects = 2;
  std::size_t max_objects = 4;
  std::size_t min_ocr = 2;
  std::size_t max_ocr = 5;
  std::size_t concept_candidates = 8;
  std::size_t image_width = 64;
  std::size_t image_height = 48;
  std::size_t subword_dim = 300;
};

inline constexpr std::size_t kMinFixtureVocab = 32;

// File names written into the output directory.
inline constexpr const char* kRecordsFile = "records.jsonl";
inline constexpr const char* kReferencesFile = "refs.jsonl";
inline constexpr const char* kVocabularyFile = "vocab.txt";
inline constexpr const char* kEmbeddingsFile = "embeddings.txt";
inline constexpr const char* kDepthDir = "depth";

// Writes a synthetic corpus: scene records, reference captions, vocabulary,
// embedding table and one PGM depth map per image. Output is a pure function
// of (seed, n_images, config). Every caption contains at least one token that
// is absent from the vocabulary and present in its record's OCR list.
void gen_fixtures(std::uint64_t seed, std::int64_t n_images, const FixtureConfig& config,
                  const std::filesystem::path& out_dir);

}  // namespace depthcap::ingest
