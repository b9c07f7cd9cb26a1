#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "depthcap/captioner/config.hpp"
#include "depthcap/depthgeom/depthgeom.hpp"
#include "depthcap/ingest/depth_map.hpp"
#include "depthcap/ingest/embedding_table.hpp"
#include "depthcap/ingest/scene.hpp"
#include "depthcap/ingest/vocabulary.hpp"
#include "depthcap/numerics/matrix.hpp"

namespace depthcap::cap {

// Everything about one image that is fixed before the learned layers run.
struct PreparedScene {
  std::string id;
  num::Matrix object_appearance;  // N x d
  num::Matrix object_spatial;     // N x 5
  num::Matrix ocr_appearance;     // M x d
  num::Matrix ocr_spatial;        // M x 5
  num::Matrix ocr_subword;        // M x 300
  num::Matrix ocr_phoc;           // M x 604
  num::Matrix ocr_confidence;     // M x 1
  num::Matrix concept_subword;    // K' x 300, K' <= K
  num::Matrix concept_score;      // K' x 1
  num::Matrix relative_depth;     // (N+M) x (N+M)
  std::vector<geom::DepthValue> depths;  // objects then OCR
  std::vector<std::string> ocr_surfaces;
  std::vector<std::string> concept_words;

  std::size_t num_objects() const { return object_appearance.rows(); }
  std::size_t num_ocr() const { return ocr_appearance.rows(); }
  std::size_t num_concepts() const { return concept_subword.rows(); }
};

PreparedScene prepare_scene(const ingest::SceneRecord& record, const ingest::DepthMap& depth,
                            const ingest::EmbeddingTable& table, std::size_t top_k, bool allow_oov);

// A fixture directory: records.jsonl, embeddings.txt, depth maps, and
// optionally vocab.txt / refs.jsonl.
struct Dataset {
  std::filesystem::path root;
  std::vector<ingest::SceneRecord> records;
  ingest::EmbeddingTable table;
  std::vector<PreparedScene> scenes;  // parallel to records
};

Dataset load_dataset(const std::filesystem::path& dir, std::size_t top_k, bool allow_oov);

}  // namespace depthcap::cap
