#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "depthcap/numerics/transformer.hpp"

namespace depthcap::defum {

struct DefumConfig {
  std::size_t dim = 0;          // appearance feature width d
  std::size_t layers = 2;       // encoder layers after the depth-aware stage
  std::size_t heads = 1;        // heads of those encoder layers
  std::size_t depth_heads = 1;  // heads of the depth-aware stage; R is broadcast to each
  std::size_t ffn_multiplier = 4;
};

// Objects first, OCR tokens after, order preserved. Both inputs need at
// least one row and the same width.
num::Matrix concat_visual(const num::Matrix& objects, const num::Matrix& ocr);
num::Var concat_visual(num::Var objects, num::Var ocr);

// Depth-enhanced feature updating: one depth-biased self-attention stage,
//   x_vti = LN(x_v + softmax(Q K^T / sqrt(d) + R) V),
// followed by `layers` standard post-norm encoder layers.
class Defum {
 public:
  Defum(num::ParamStore& store, const DefumConfig& config);

  // `relative_depth` is the (n+m)x(n+m) bias; nullopt runs the same stage
  // with no bias term at all.
  num::Var depth_aware_attention(num::Var visual, std::optional<num::Var> relative_depth) const;
  num::Var update(num::Var visual, std::optional<num::Var> relative_depth) const;

  struct Split {
    num::Var objects;
    num::Var ocr;
  };
  static Split split(num::Var updated, std::size_t n_objects);

  const DefumConfig& config() const noexcept { return config_; }

 private:
  DefumConfig config_;
  num::Parameter* query_;
  num::Parameter* key_;
  num::Parameter* value_;
  num::LayerNormParams depth_norm_;
  std::vector<num::EncoderLayerParams> layers_;
};

}  // namespace depthcap::defum
