#include "depthcap/captioner/model.hpp"

#include <algorithm>

#include "depthcap/errors.hpp"

namespace depthcap::cap {

using num::Matrix;
using num::Var;

std::string CaptionHypothesis::text() const {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t.surface;
  }
  return out;
}

std::vector<TokenRef> align_targets(const std::vector<std::string>& caption_tokens,
                                    const ingest::Vocabulary& vocab,
                                    const std::vector<std::string>& ocr_surfaces, bool prefer_copy,
                                    std::size_t max_len) {
  std::vector<TokenRef> targets;
  auto copy_index = [&](const std::string& w) -> std::optional<std::size_t> {
    auto it = std::find(ocr_surfaces.begin(), ocr_surfaces.end(), w);
    if (it == ocr_surfaces.end()) return std::nullopt;
    return static_cast<std::size_t>(it - ocr_surfaces.begin());
  };
  for (const auto& w : caption_tokens) {
    const auto in_vocab = vocab.index_of(w);
    const auto in_ocr = copy_index(w);
    if (in_vocab && (!prefer_copy || !in_ocr)) {
      targets.push_back({TokenSource::Vocab, *in_vocab});
    } else if (in_ocr) {
      targets.push_back({TokenSource::Ocr, *in_ocr});
    } else {
      targets.push_back({TokenSource::Vocab, ingest::Vocabulary::kUnk});
    }
  }
  targets.push_back({TokenSource::Vocab, ingest::Vocabulary::kEos});
  if (targets.size() > max_len) targets.resize(max_len);
  return targets;
}

std::size_t argmax_first(std::span<const double> scores) {
  if (scores.empty()) throw ArgumentError("argmax over no scores");
  return static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

std::vector<std::uint8_t> multimodal_mask(std::size_t entities, std::size_t steps) {
  const std::size_t total = entities + steps;
  std::vector<std::uint8_t> allowed(total * total, 0);
  for (std::size_t i = 0; i < total; ++i) {
    for (std::size_t j = 0; j < total; ++j) {
      const bool key_is_entity = j < entities;
      const bool query_is_entity = i < entities;
      allowed[i * total + j] = key_is_entity || (!query_is_entity && j <= i);
    }
  }
  return allowed;
}

CaptionModel::CaptionModel(ModelConfig config, ingest::Vocabulary vocab)
    : config_(std::move(config)), vocab_(std::move(vocab)), store_(std::make_unique<num::ParamStore>(config_.seed)) {
  validate(config_);
  if (config_.appearance_dim == 0) throw ArgumentError("CaptionModel: appearance_dim is not set");
  const std::size_t t = config_.t;
  const num::Init head_init = config_.zero_heads ? num::Init::Zeros : num::Init::Xavier;

  embedder_ = std::make_unique<features::EntityEmbedder>(*store_, config_.appearance_dim, t);
  defum_ = std::make_unique<defum::Defum>(
      *store_, defum::DefumConfig{config_.appearance_dim, config_.defum_layers, config_.defum_heads,
                                  config_.depth_heads, 4});
  alignment_ = std::make_unique<sgam::SemanticAlignment>(*store_, config_.sgam_axis);
  for (std::size_t i = 0; i < config_.mmt_layers; ++i) {
    mmt_layers_.push_back(
        num::EncoderLayerParams::create(*store_, "mmt.layer" + std::to_string(i), t, config_.heads, 4 * t));
  }
  word_embedding_ = &store_->add("decoder.word_embedding", vocab_.size(), t, num::Init::Xavier);
  position_embedding_ = &store_->add("decoder.position_embedding", config_.max_len, t, num::Init::Xavier);
  vocab_weight_ = &store_->add("head.vocab_weight", t, vocab_.size(), head_init);
  vocab_bias_ = &store_->add("head.vocab_bias", 1, vocab_.size(), num::Init::Zeros);
  pointer_weight_ = &store_->add("head.pointer_weight", t, t, head_init);
  pointer_bias_ = &store_->add("head.pointer_bias", 1, 1, num::Init::Zeros);
}

CaptionModel::Encoded CaptionModel::encode(num::Tape& tape, const PreparedScene& scene) const {
  if (scene.object_appearance.cols() != config_.appearance_dim) {
    throw ShapeError("scene '" + scene.id + "': appearance width " + std::to_string(scene.object_appearance.cols()) +
                     " does not match the model (" + std::to_string(config_.appearance_dim) + ")");
  }
  const std::size_t n = scene.num_objects();
  Var visual = defum::concat_visual(tape.constant(scene.object_appearance), tape.constant(scene.ocr_appearance));
  Var updated = defum_->update(visual, tape.constant(scene.relative_depth));
  // The updated object rows are not consumed downstream; objects embed from
  // their raw appearance features.
  Var ocr_appearance = defum::Defum::split(updated, n).ocr;

  Var ocr_subword = tape.constant(scene.ocr_subword);
  Var aligned = scene.num_concepts() > 0
                    ? alignment_->align(tape.constant(scene.concept_subword), ocr_subword)
                    : num::l2_normalize_rows(ocr_subword);

  Encoded out;
  out.objects = embedder_->embed_objects(tape.constant(scene.object_appearance), tape.constant(scene.object_spatial));
  out.ocr = embedder_->embed_ocr(ocr_appearance, aligned, tape.constant(scene.ocr_phoc),
                                 tape.constant(scene.ocr_spatial), tape.constant(scene.ocr_confidence));
  if (scene.num_concepts() > 0) {
    out.concepts =
        embedder_->embed_concepts(tape.constant(scene.concept_subword), tape.constant(scene.concept_score));
  }
  return out;
}

CaptionModel::MmtOutput CaptionModel::mmt_forward(Var objects, Var ocr, std::optional<Var> concepts,
                                                  Var decoder_inputs) const {
  std::vector<Var> parts{objects, ocr};
  if (concepts) parts.push_back(*concepts);
  const std::size_t entities = objects.rows() + ocr.rows() + (concepts ? concepts->rows() : 0);
  const std::size_t steps = decoder_inputs.rows();
  parts.push_back(decoder_inputs);
  for (Var p : parts) {
    if (p.cols() != config_.t) {
      throw ShapeError("mmt_forward: input " + p.value().shape_string() + " does not have width " +
                       std::to_string(config_.t));
    }
  }
  Var x = num::concat_rows(parts);
  auto mask = std::make_shared<const std::vector<std::uint8_t>>(multimodal_mask(entities, steps));
  for (const auto& layer : mmt_layers_) x = layer(x, mask);
  return {num::slice_rows(x, entities, steps), num::slice_rows(x, objects.rows(), ocr.rows())};
}

Var CaptionModel::predict_scores(Var decoder_out, Var ocr_out) const {
  num::Tape& tape = *decoder_out.tape;
  const std::size_t steps = decoder_out.rows();
  Var vocab_logits = num::linear(decoder_out, tape.parameter(*vocab_weight_), tape.parameter(*vocab_bias_));
  Var pointer = num::matmul_nt(num::matmul(decoder_out, tape.parameter(*pointer_weight_)), ocr_out);
  // Broadcast the scalar pointer bias to every (step, token) pair.
  Var bias_column = num::gather_rows(tape.parameter(*pointer_bias_), std::vector<std::size_t>(steps, 0));
  Var bias = num::matmul(bias_column, tape.constant(Matrix(1, ocr_out.rows(), 1.0)));
  return num::concat_cols({vocab_logits, num::add(pointer, bias)});
}

Var CaptionModel::decoder_input(num::Tape& tape, const TokenRef& previous, std::size_t step, Var ocr_embeddings) const {
  if (step >= config_.max_len) {
    throw IndexError("decoder step " + std::to_string(step) + " exceeds max_len " + std::to_string(config_.max_len));
  }
  Var token;
  if (previous.source == TokenSource::Vocab) {
    if (previous.index >= vocab_.size()) {
      throw IndexError("vocabulary index " + std::to_string(previous.index) + " out of range");
    }
    token = num::gather_rows(tape.parameter(*word_embedding_), {previous.index});
  } else {
    if (previous.index >= ocr_embeddings.rows()) {
      throw IndexError("OCR index " + std::to_string(previous.index) + " out of range " +
                       std::to_string(ocr_embeddings.rows()));
    }
    token = num::slice_rows(ocr_embeddings, previous.index, 1);
  }
  return num::add(token, num::gather_rows(tape.parameter(*position_embedding_), {step}));
}

Var CaptionModel::decoder_inputs(num::Tape& tape, const std::vector<TokenRef>& previous, Var ocr_embeddings) const {
  if (previous.empty()) throw ArgumentError("decoder_inputs: no steps");
  std::vector<Var> rows;
  rows.reserve(previous.size());
  for (std::size_t step = 0; step < previous.size(); ++step) {
    rows.push_back(decoder_input(tape, previous[step], step, ocr_embeddings));
  }
  return rows.size() == 1 ? rows.front() : num::concat_rows(rows);
}

CaptionModel::LossResult CaptionModel::teacher_forced_loss(num::Tape& tape, const PreparedScene& scene,
                                                           const std::vector<TokenRef>& targets) const {
  if (targets.empty()) throw ArgumentError("teacher_forced_loss: empty target sequence");
  if (targets.size() > config_.max_len) throw ArgumentError("teacher_forced_loss: targets exceed max_len");
  const Encoded enc = encode(tape, scene);

  std::vector<TokenRef> previous{{TokenSource::Vocab, ingest::Vocabulary::kBos}};
  previous.insert(previous.end(), targets.begin(), targets.end() - 1);
  Var inputs = decoder_inputs(tape, previous, enc.ocr);
  const MmtOutput out = mmt_forward(enc.objects, enc.ocr, enc.concepts, inputs);
  Var scores = predict_scores(out.decoder, out.ocr);

  std::vector<std::size_t> labels;
  labels.reserve(targets.size());
  for (const auto& t : targets) {
    labels.push_back(t.source == TokenSource::Vocab ? t.index : vocab_.size() + t.index);
  }
  LossResult result;
  result.total = labels.size();
  const Matrix& s = scores.value();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (argmax_first(s.row(i)) == labels[i]) ++result.correct;
  }
  result.loss = num::cross_entropy(scores, std::move(labels));
  return result;
}

std::string CaptionModel::surface(const TokenRef& ref, const PreparedScene& scene) const {
  if (ref.source == TokenSource::Vocab) return vocab_.word(ref.index);
  if (ref.index >= scene.ocr_surfaces.size()) throw IndexError("OCR index out of range");
  return scene.ocr_surfaces[ref.index];
}

CaptionHypothesis CaptionModel::generate(const PreparedScene& scene) const {
  Matrix objects, ocr;
  std::optional<Matrix> concepts;
  {
    num::Tape tape;
    const Encoded enc = encode(tape, scene);
    objects = enc.objects.value();
    ocr = enc.ocr.value();
    if (enc.concepts) concepts = enc.concepts->value();
  }

  CaptionHypothesis hyp;
  std::vector<TokenRef> previous{{TokenSource::Vocab, ingest::Vocabulary::kBos}};
  for (std::size_t step = 0; step < config_.max_len; ++step) {
    num::Tape tape;
    Var ocr_var = tape.constant(ocr);
    std::optional<Var> concept_var;
    if (concepts) concept_var = tape.constant(*concepts);
    Var inputs = decoder_inputs(tape, previous, ocr_var);
    const MmtOutput out = mmt_forward(tape.constant(objects), ocr_var, concept_var, inputs);
    Var scores = predict_scores(num::slice_rows(out.decoder, step, 1), out.ocr);
    const std::size_t best = argmax_first(scores.value().row(0));
    if (best == ingest::Vocabulary::kEos) {
      hyp.terminated = true;
      break;
    }
    const TokenRef ref = best < vocab_.size() ? TokenRef{TokenSource::Vocab, best}
                                              : TokenRef{TokenSource::Ocr, best - vocab_.size()};
    hyp.tokens.push_back({surface(ref, scene), ref});
    previous.push_back(ref);
  }
  return hyp;
}

}  // namespace depthcap::cap
