#include "depthcap/defum/defum.hpp"

#include "depthcap/errors.hpp"

namespace depthcap::defum {

using num::Matrix;
using num::Var;

Matrix concat_visual(const Matrix& objects, const Matrix& ocr) {
  num::Tape t;
  return concat_visual(t.constant(objects), t.constant(ocr)).value();
}

Var concat_visual(Var objects, Var ocr) {
  if (objects.rows() == 0) throw ArgumentError("concat_visual: at least one object row is required");
  if (ocr.rows() == 0) throw ArgumentError("concat_visual: at least one OCR row is required");
  if (objects.cols() != ocr.cols()) {
    throw ShapeError("concat_visual: object features " + objects.value().shape_string() +
                     " and OCR features " + ocr.value().shape_string() + " differ in width");
  }
  return num::concat_rows({objects, ocr});
}

Defum::Defum(num::ParamStore& store, const DefumConfig& config) : config_(config) {
  if (config.dim == 0) throw ArgumentError("Defum: zero feature width");
  if (config.layers == 0) throw ArgumentError("Defum: at least one encoder layer is required");
  if (config.heads == 0 || config.dim % config.heads != 0) {
    throw ArgumentError("Defum: " + std::to_string(config.heads) + " heads do not divide width " +
                        std::to_string(config.dim));
  }
  if (config.depth_heads == 0 || config.dim % config.depth_heads != 0) {
    throw ArgumentError("Defum: " + std::to_string(config.depth_heads) +
                        " depth-attention heads do not divide width " + std::to_string(config.dim));
  }
  query_ = &store.add("defum.depth_attn.wq", config.dim, config.dim, num::Init::Xavier);
  key_ = &store.add("defum.depth_attn.wk", config.dim, config.dim, num::Init::Xavier);
  value_ = &store.add("defum.depth_attn.wv", config.dim, config.dim, num::Init::Xavier);
  depth_norm_ = num::LayerNormParams::create(store, "defum.depth_attn_ln", config.dim);
  for (std::size_t i = 0; i < config.layers; ++i) {
    layers_.push_back(num::EncoderLayerParams::create(store, "defum.layer" + std::to_string(i), config.dim,
                                                      config.heads, config.ffn_multiplier * config.dim));
  }
}

Var Defum::depth_aware_attention(Var visual, std::optional<Var> relative_depth) const {
  if (visual.cols() != config_.dim) {
    throw ShapeError("Defum: input " + visual.value().shape_string() + " does not have width " +
                     std::to_string(config_.dim));
  }
  if (relative_depth && (relative_depth->rows() != visual.rows() || relative_depth->cols() != visual.rows())) {
    throw ShapeError("Defum: relative depth matrix " + relative_depth->value().shape_string() +
                     " does not match " + std::to_string(visual.rows()) + " entities");
  }
  num::Tape& t = *visual.tape;
  Var q = num::matmul(visual, t.parameter(*query_));
  Var k = num::matmul(visual, t.parameter(*key_));
  Var v = num::matmul(visual, t.parameter(*value_));
  Var attended = num::multi_head_attention(q, k, v, config_.depth_heads, relative_depth);
  return depth_norm_(num::add(visual, attended));
}

Var Defum::update(Var visual, std::optional<Var> relative_depth) const {
  Var x = depth_aware_attention(visual, relative_depth);
  for (const auto& layer : layers_) x = layer(x);
  return x;
}

Defum::Split Defum::split(Var updated, std::size_t n_objects) {
  if (n_objects == 0 || n_objects >= updated.rows()) {
    throw ShapeError("Defum::split: cannot split " + updated.value().shape_string() + " after " +
                     std::to_string(n_objects) + " object rows");
  }
  return {num::slice_rows(updated, 0, n_objects), num::slice_rows(updated, n_objects, updated.rows() - n_objects)};
}

}  // namespace depthcap::defum
