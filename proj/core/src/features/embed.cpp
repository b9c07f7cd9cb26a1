#include "depthcap/features/embed.hpp"

#include "depthcap/errors.hpp"

namespace depthcap::features {

using num::Init;
using num::Matrix;
using num::Var;

EntityEmbedder::EntityEmbedder(num::ParamStore& store, std::size_t appearance_dim, std::size_t common_dim)
    : appearance_dim_(appearance_dim), common_dim_(common_dim) {
  if (appearance_dim == 0 || common_dim == 0) throw ArgumentError("EntityEmbedder: zero dimension");
  object_appearance_ = &store.add("embed.object_appearance", appearance_dim, common_dim, Init::Xavier);
  spatial_ = &store.add("embed.spatial", 5, common_dim, Init::Xavier);
  ocr_appearance_ = &store.add("embed.ocr_appearance", appearance_dim, common_dim, Init::Xavier);
  ocr_subword_ = &store.add("embed.ocr_subword", subword_dim_, common_dim, Init::Xavier);
  ocr_phoc_ = &store.add("embed.ocr_phoc", kPhocDim, common_dim, Init::Xavier);
  ocr_confidence_ = &store.add("embed.ocr_confidence", 1, common_dim, Init::Xavier);
  concept_subword_ = &store.add("embed.concept_subword", subword_dim_, common_dim, Init::Xavier);
  concept_score_ = &store.add("embed.concept_score", 1, common_dim, Init::Xavier);

  object_appearance_norm_ = num::LayerNormParams::create(store, "embed.object_appearance_ln", common_dim);
  object_spatial_norm_ = num::LayerNormParams::create(store, "embed.object_spatial_ln", common_dim);
  ocr_fused_norm_ = num::LayerNormParams::create(store, "embed.ocr_fused_ln", common_dim);
  ocr_spatial_norm_ = num::LayerNormParams::create(store, "embed.ocr_spatial_ln", common_dim);
  ocr_confidence_norm_ = num::LayerNormParams::create(store, "embed.ocr_confidence_ln", common_dim);
  concept_subword_norm_ = num::LayerNormParams::create(store, "embed.concept_subword_ln", common_dim);
  concept_score_norm_ = num::LayerNormParams::create(store, "embed.concept_score_ln", common_dim);
}

Var EntityEmbedder::embed_objects(Var appearance, Var spatial) const {
  num::Tape& t = *appearance.tape;
  Var a = object_appearance_norm_(num::linear(appearance, t.parameter(*object_appearance_)));
  Var s = object_spatial_norm_(num::linear(spatial, t.parameter(*spatial_)));
  return num::add(a, s);
}

Var EntityEmbedder::embed_ocr(Var appearance, Var subword, Var phoc, Var spatial, Var confidence) const {
  num::Tape& t = *appearance.tape;
  Var fused = num::add(num::add(num::linear(appearance, t.parameter(*ocr_appearance_)),
                                num::linear(subword, t.parameter(*ocr_subword_))),
                       num::linear(phoc, t.parameter(*ocr_phoc_)));
  Var s = ocr_spatial_norm_(num::linear(spatial, t.parameter(*spatial_)));
  Var c = ocr_confidence_norm_(num::linear(confidence, t.parameter(*ocr_confidence_)));
  return num::add(num::add(ocr_fused_norm_(fused), s), c);
}

Var EntityEmbedder::embed_concepts(Var subword, Var score) const {
  num::Tape& t = *subword.tape;
  Var w = concept_subword_norm_(num::linear(subword, t.parameter(*concept_subword_)));
  Var s = concept_score_norm_(num::linear(score, t.parameter(*concept_score_)));
  return num::add(w, s);
}

namespace {

std::vector<double> first_row(const Var& v) { return v.value().row_copy(0); }

}  // namespace

EntityEmbedding EntityEmbedder::embed_object(std::span<const double> appearance,
                                             const geom::SpatialFeature& spatial) const {
  num::Tape t;
  Var out = embed_objects(t.constant(Matrix::row_vector(appearance)), t.constant(Matrix::row_vector(spatial)));
  return {EntityKind::Object, first_row(out)};
}

EntityEmbedding EntityEmbedder::embed_ocr(std::span<const double> appearance, std::span<const double> subword,
                                          const PhocVector& phoc, const geom::SpatialFeature& spatial,
                                          double confidence) const {
  num::Tape t;
  const double conf[] = {confidence};
  Var out = embed_ocr(t.constant(Matrix::row_vector(appearance)), t.constant(Matrix::row_vector(subword)),
                      t.constant(phoc_row(phoc)), t.constant(Matrix::row_vector(spatial)),
                      t.constant(Matrix::row_vector(conf)));
  return {EntityKind::Ocr, first_row(out)};
}

EntityEmbedding EntityEmbedder::embed_concept(std::span<const double> subword, double score) const {
  num::Tape t;
  const double s[] = {score};
  Var out = embed_concepts(t.constant(Matrix::row_vector(subword)), t.constant(Matrix::row_vector(s)));
  return {EntityKind::Concept, first_row(out)};
}

}  // namespace depthcap::features
