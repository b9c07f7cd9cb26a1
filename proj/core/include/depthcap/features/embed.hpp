#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "depthcap/depthgeom/depthgeom.hpp"
#include "depthcap/features/phoc.hpp"
#include "depthcap/ingest/embedding_table.hpp"
#include "depthcap/numerics/transformer.hpp"

namespace depthcap::features {

enum class EntityKind { Object, Ocr, Concept };

struct EntityEmbedding {
  EntityKind kind = EntityKind::Object;
  std::vector<double> vec;
};

// Projects objects, OCR tokens and visual concepts into the common
// t-dimensional space. Each branch is a bias-free projection followed by its
// own layer norm; the spatial projection is one parameter shared by the
// object and OCR paths.
class EntityEmbedder {
 public:
  EntityEmbedder(num::ParamStore& store, std::size_t appearance_dim, std::size_t common_dim);

  // Batched forms, one entity per row.
  num::Var embed_objects(num::Var appearance, num::Var spatial) const;
  num::Var embed_ocr(num::Var appearance, num::Var subword, num::Var phoc, num::Var spatial,
                     num::Var confidence) const;
  num::Var embed_concepts(num::Var subword, num::Var score) const;

  // Single-entity conveniences over the batched forms.
  EntityEmbedding embed_object(std::span<const double> appearance, const geom::SpatialFeature& spatial) const;
  EntityEmbedding embed_ocr(std::span<const double> appearance, std::span<const double> subword,
                            const PhocVector& phoc, const geom::SpatialFeature& spatial, double confidence) const;
  EntityEmbedding embed_concept(std::span<const double> subword, double score) const;

  std::size_t appearance_dim() const noexcept { return appearance_dim_; }
  std::size_t common_dim() const noexcept { return common_dim_; }
  num::Parameter& spatial_weight() const noexcept { return *spatial_; }

 private:
  std::size_t appearance_dim_;
  std::size_t common_dim_;
  std::size_t subword_dim_ = ingest::kSubwordDim;

  num::Parameter* object_appearance_;
  num::Parameter* spatial_;
  num::Parameter* ocr_appearance_;
  num::Parameter* ocr_subword_;
  num::Parameter* ocr_phoc_;
  num::Parameter* ocr_confidence_;
  num::Parameter* concept_subword_;
  num::Parameter* concept_score_;

  num::LayerNormParams object_appearance_norm_;
  num::LayerNormParams object_spatial_norm_;
  num::LayerNormParams ocr_fused_norm_;
  num::LayerNormParams ocr_spatial_norm_;
  num::LayerNormParams ocr_confidence_norm_;
  num::LayerNormParams concept_subword_norm_;
  num::LayerNormParams concept_score_norm_;
};

}  // namespace depthcap::features
