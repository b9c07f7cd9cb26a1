#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "depthcap/numerics/ops.hpp"
#include "depthcap/numerics/params.hpp"

namespace depthcap::num {

using AttentionMask = std::shared_ptr<const std::vector<std::uint8_t>>;

struct LayerNormParams {
  Parameter* gain = nullptr;
  Parameter* bias = nullptr;

  static LayerNormParams create(ParamStore& store, const std::string& prefix, std::size_t width);
  Var operator()(Var x) const;
};

// Scaled dot-product attention split over `heads` column groups. `bias`, if
// present, is added to every head's logits before the softmax; `mask`
// removes (query, key) pairs entirely.
Var multi_head_attention(Var q, Var k, Var v, std::size_t heads, std::optional<Var> bias = std::nullopt,
                         const AttentionMask& mask = nullptr);

struct SelfAttentionParams {
  Parameter* wq = nullptr;
  Parameter* bq = nullptr;
  Parameter* wk = nullptr;
  Parameter* bk = nullptr;
  Parameter* wv = nullptr;
  Parameter* bv = nullptr;
  Parameter* wo = nullptr;
  Parameter* bo = nullptr;
  std::size_t heads = 1;

  static SelfAttentionParams create(ParamStore& store, const std::string& prefix, std::size_t width,
                                    std::size_t heads);
  Var operator()(Var x, const AttentionMask& mask = nullptr) const;
};

struct FeedForwardParams {
  Parameter* w1 = nullptr;
  Parameter* b1 = nullptr;
  Parameter* w2 = nullptr;
  Parameter* b2 = nullptr;

  static FeedForwardParams create(ParamStore& store, const std::string& prefix, std::size_t width,
                                  std::size_t hidden);
  Var operator()(Var x) const;
};

// Post-norm encoder layer: x = LN(x + MHA(x)); x = LN(x + FFN(x)).
struct EncoderLayerParams {
  SelfAttentionParams attention;
  LayerNormParams attention_norm;
  FeedForwardParams feed_forward;
  LayerNormParams output_norm;

  static EncoderLayerParams create(ParamStore& store, const std::string& prefix, std::size_t width,
                                   std::size_t heads, std::size_t hidden);
  Var operator()(Var x, const AttentionMask& mask = nullptr) const;
};

}  // namespace depthcap::num
