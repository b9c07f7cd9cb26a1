#include "depthcap/captioner/prepare.hpp"

#include "depthcap/errors.hpp"
#include "depthcap/eval/tokenize.hpp"
#include "depthcap/features/phoc.hpp"
#include "depthcap/ingest/fixtures.hpp"
#include "depthcap/sgam/sgam.hpp"

namespace depthcap::cap {

using num::Matrix;

namespace {

void set_row(Matrix& m, std::size_t r, std::span<const double> values) {
  std::copy(values.begin(), values.end(), m.row(r).begin());
}

}  // namespace

PreparedScene prepare_scene(const ingest::SceneRecord& record, const ingest::DepthMap& depth,
                            const ingest::EmbeddingTable& table, std::size_t top_k, bool allow_oov) {
  ingest::validate(record);
  if (depth.width != record.width || depth.height != record.height) {
    throw ValidationError("record '" + record.id + "': depth map is " + std::to_string(depth.width) + "x" +
                          std::to_string(depth.height) + " but the image is " + std::to_string(record.width) +
                          "x" + std::to_string(record.height));
  }
  const std::size_t n = record.objects.size();
  const std::size_t m = record.ocr.size();
  const std::size_t d = record.feature_dim();
  PreparedScene s;
  s.id = record.id;
  s.object_appearance = Matrix(n, d);
  s.object_spatial = Matrix(n, 5);
  s.ocr_appearance = Matrix(m, d);
  s.ocr_spatial = Matrix(m, 5);
  s.ocr_subword = Matrix(m, table.dim());
  s.ocr_phoc = Matrix(m, features::kPhocDim);
  s.ocr_confidence = Matrix(m, 1);

  for (std::size_t i = 0; i < n; ++i) {
    const auto& obj = record.objects[i];
    const geom::DepthValue dv = geom::depth_value_of_region(depth, obj.box);
    s.depths.push_back(dv);
    set_row(s.object_appearance, i, obj.feat);
    set_row(s.object_spatial, i, geom::spatial_feature(obj.box, dv, record.width, record.height));
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto& ocr = record.ocr[i];
    const geom::DepthValue dv = geom::depth_value_of_region(depth, ocr.box);
    s.depths.push_back(dv);
    set_row(s.ocr_appearance, i, ocr.feat);
    set_row(s.ocr_spatial, i, geom::spatial_feature(ocr.box, dv, record.width, record.height));
    try {
      set_row(s.ocr_subword, i, table.lookup(ocr.token, allow_oov));
    } catch (const OovError& e) {
      throw OovError("record '" + record.id + "': ocr[" + std::to_string(i) + "]: " + e.what() +
                     " (pass --allow-oov to substitute zeros)");
    }
    set_row(s.ocr_phoc, i, features::phoc_row(features::phoc(ocr.token)).row(0));
    s.ocr_confidence(i, 0) = ocr.conf;
    s.ocr_surfaces.push_back(eval::normalize_surface(ocr.token));
  }
  s.relative_depth = geom::relative_depth_matrix(s.depths);

  sgam::ConceptSet concepts;
  try {
    concepts = sgam::select_concepts(record.concepts, top_k, table, allow_oov);
  } catch (const OovError& e) {
    throw OovError("record '" + record.id + "': concepts: " + e.what());
  }
  s.concept_subword = Matrix(concepts.size(), table.dim());
  s.concept_score = Matrix(concepts.size(), 1);
  for (std::size_t k = 0; k < concepts.size(); ++k) {
    set_row(s.concept_subword, k, concepts[k].subword);
    s.concept_score(k, 0) = concepts[k].score;
    s.concept_words.push_back(concepts[k].word);
  }
  return s;
}

Dataset load_dataset(const std::filesystem::path& dir, std::size_t top_k, bool allow_oov) {
  Dataset ds;
  ds.root = dir;
  ds.records = ingest::load_scene_records(dir / ingest::kRecordsFile);
  if (ds.records.empty()) throw ValidationError("no scene records in '" + dir.string() + "'");
  ds.table = ingest::load_embedding_table(dir / ingest::kEmbeddingsFile);
  for (const auto& r : ds.records) {
    const std::filesystem::path depth_path =
        std::filesystem::path(r.depth_map).is_absolute() ? std::filesystem::path(r.depth_map) : dir / r.depth_map;
    ds.scenes.push_back(prepare_scene(r, ingest::load_depth_map(depth_path), ds.table, top_k, allow_oov));
  }
  return ds;
}

}  // namespace depthcap::cap
