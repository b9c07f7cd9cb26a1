#include "depthcap/numerics/transformer.hpp"

#include <cmath>

#include "depthcap/errors.hpp"

namespace depthcap::num {

LayerNormParams LayerNormParams::create(ParamStore& store, const std::string& prefix, std::size_t width) {
  return {&store.add(prefix + ".gain", 1, width, Init::Ones),
          &store.add(prefix + ".bias", 1, width, Init::Zeros)};
}

Var LayerNormParams::operator()(Var x) const {
  Tape& tape = *x.tape;
  return layer_norm_rows(x, tape.parameter(*gain), tape.parameter(*bias));
}

Var multi_head_attention(Var q, Var k, Var v, std::size_t heads, std::optional<Var> bias,
                         const AttentionMask& mask) {
  if (heads == 0 || q.cols() % heads != 0) {
    throw ShapeError("multi_head_attention: " + std::to_string(heads) + " heads do not divide width " +
                     std::to_string(q.cols()));
  }
  if (k.cols() != q.cols() || v.rows() != k.rows()) {
    throw ShapeError("multi_head_attention: q " + q.value().shape_string() + ", k " +
                     k.value().shape_string() + ", v " + v.value().shape_string());
  }
  if (bias && (bias->rows() != q.rows() || bias->cols() != k.rows())) {
    throw ShapeError("multi_head_attention: bias " + bias->value().shape_string() + " does not match " +
                     std::to_string(q.rows()) + "x" + std::to_string(k.rows()) + " logits");
  }
  const std::size_t head_width = q.cols() / heads;
  const std::size_t value_width = v.cols() / heads;
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(head_width));
  std::vector<Var> outs;
  outs.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    Var qh = heads == 1 ? q : slice_cols(q, h * head_width, head_width);
    Var kh = heads == 1 ? k : slice_cols(k, h * head_width, head_width);
    Var vh = heads == 1 ? v : slice_cols(v, h * value_width, value_width);
    Var logits = scale(matmul_nt(qh, kh), inv_scale);
    if (bias) logits = add(logits, *bias);
    outs.push_back(matmul(softmax_rows(logits, mask), vh));
  }
  return heads == 1 ? outs.front() : concat_cols(outs);
}

SelfAttentionParams SelfAttentionParams::create(ParamStore& store, const std::string& prefix,
                                                std::size_t width, std::size_t heads) {
  if (heads == 0 || width % heads != 0) {
    throw ArgumentError(prefix + ": " + std::to_string(heads) + " heads do not divide width " +
                        std::to_string(width));
  }
  SelfAttentionParams p;
  p.wq = &store.add(prefix + ".wq", width, width, Init::Xavier);
  p.bq = &store.add(prefix + ".bq", 1, width, Init::Zeros);
  p.wk = &store.add(prefix + ".wk", width, width, Init::Xavier);
  p.bk = &store.add(prefix + ".bk", 1, width, Init::Zeros);
  p.wv = &store.add(prefix + ".wv", width, width, Init::Xavier);
  p.bv = &store.add(prefix + ".bv", 1, width, Init::Zeros);
  p.wo = &store.add(prefix + ".wo", width, width, Init::Xavier);
  p.bo = &store.add(prefix + ".bo", 1, width, Init::Zeros);
  p.heads = heads;
  return p;
}

Var SelfAttentionParams::operator()(Var x, const AttentionMask& mask) const {
  Tape& t = *x.tape;
  Var q = linear(x, t.parameter(*wq), t.parameter(*bq));
  Var k = linear(x, t.parameter(*wk), t.parameter(*bk));
  Var v = linear(x, t.parameter(*wv), t.parameter(*bv));
  Var ctx = multi_head_attention(q, k, v, heads, std::nullopt, mask);
  return linear(ctx, t.parameter(*wo), t.parameter(*bo));
}

FeedForwardParams FeedForwardParams::create(ParamStore& store, const std::string& prefix,
                                            std::size_t width, std::size_t hidden) {
  return {&store.add(prefix + ".w1", width, hidden, Init::Xavier),
          &store.add(prefix + ".b1", 1, hidden, Init::Zeros),
          &store.add(prefix + ".w2", hidden, width, Init::Xavier),
          &store.add(prefix + ".b2", 1, width, Init::Zeros)};
}

Var FeedForwardParams::operator()(Var x) const {
  Tape& t = *x.tape;
  Var h = gelu(linear(x, t.parameter(*w1), t.parameter(*b1)));
  return linear(h, t.parameter(*w2), t.parameter(*b2));
}

EncoderLayerParams EncoderLayerParams::create(ParamStore& store, const std::string& prefix,
                                              std::size_t width, std::size_t heads, std::size_t hidden) {
  EncoderLayerParams p;
  p.attention = SelfAttentionParams::create(store, prefix + ".attn", width, heads);
  p.attention_norm = LayerNormParams::create(store, prefix + ".attn_ln", width);
  p.feed_forward = FeedForwardParams::create(store, prefix + ".ffn", width, hidden);
  p.output_norm = LayerNormParams::create(store, prefix + ".out_ln", width);
  return p;
}

Var EncoderLayerParams::operator()(Var x, const AttentionMask& mask) const {
  Var h = attention_norm(add(x, attention(x, mask)));
  return output_norm(add(h, feed_forward(h)));
}

}  // namespace depthcap::num
