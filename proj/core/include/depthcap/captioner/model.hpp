#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "depthcap/captioner/config.hpp"
#include "depthcap/captioner/prepare.hpp"
#include "depthcap/defum/defum.hpp"
#include "depthcap/features/embed.hpp"
#include "depthcap/ingest/vocabulary.hpp"
#include "depthcap/numerics/transformer.hpp"
#include "depthcap/sgam/sgam.hpp"

namespace depthcap::cap {

enum class TokenSource { Vocab, Ocr };

// A predicted or target token: a vocabulary index or an OCR position.
struct TokenRef {
  TokenSource source = TokenSource::Vocab;
  std::size_t index = 0;

  friend bool operator==(const TokenRef&, const TokenRef&) = default;
};

struct EmittedToken {
  std::string surface;
  TokenRef ref;
};

struct CaptionHypothesis {
  std::vector<EmittedToken> tokens;
  bool terminated = false;  // saw </s> before max_len

  std::string text() const;
};

// Maps caption words to supervision targets: vocabulary first, then the
// first matching OCR token, else <unk> (prefer_copy swaps the first two).
// Appends </s> and truncates to max_len.
std::vector<TokenRef> align_targets(const std::vector<std::string>& caption_tokens,
                                    const ingest::Vocabulary& vocab,
                                    const std::vector<std::string>& ocr_surfaces, bool prefer_copy,
                                    std::size_t max_len);

// Index of the first maximum.
std::size_t argmax_first(std::span<const double> scores);

// Attention mask over [entities | decoder steps]: entities see all entities
// and no decoder step; decoder step i sees all entities and steps <= i.
std::vector<std::uint8_t> multimodal_mask(std::size_t entities, std::size_t steps);

class CaptionModel {
 public:
  // config.appearance_dim must be set.
  CaptionModel(ModelConfig config, ingest::Vocabulary vocab);

  struct Encoded {
    num::Var objects;                   // N x t
    num::Var ocr;                       // M x t
    std::optional<num::Var> concepts;   // K' x t; absent when K' == 0
  };
  // Depth values -> DeFUM -> SgAM -> entity embeddings.
  Encoded encode(num::Tape& tape, const PreparedScene& scene) const;

  struct MmtOutput {
    num::Var decoder;  // T x t
    num::Var ocr;      // M x t
  };
  MmtOutput mmt_forward(num::Var objects, num::Var ocr, std::optional<num::Var> concepts,
                        num::Var decoder_inputs) const;

  // [vocab logits | pointer scores], one row per decoder row: T x (|V| + M).
  num::Var predict_scores(num::Var decoder_out, num::Var ocr_out) const;

  // Embedding fed at `step` for the previously emitted token.
  num::Var decoder_input(num::Tape& tape, const TokenRef& previous, std::size_t step, num::Var ocr_embeddings) const;
  // Inputs for steps 0..T-1 given the tokens emitted before each (the first is <s>).
  num::Var decoder_inputs(num::Tape& tape, const std::vector<TokenRef>& previous, num::Var ocr_embeddings) const;

  struct LossResult {
    num::Var loss;  // mean cross-entropy over the target steps
    std::size_t correct = 0;
    std::size_t total = 0;
  };
  LossResult teacher_forced_loss(num::Tape& tape, const PreparedScene& scene,
                                 const std::vector<TokenRef>& targets) const;

  CaptionHypothesis generate(const PreparedScene& scene) const;

  std::string surface(const TokenRef& ref, const PreparedScene& scene) const;

  const ModelConfig& config() const noexcept { return config_; }
  const ingest::Vocabulary& vocab() const noexcept { return vocab_; }
  num::ParamStore& params() noexcept { return *store_; }
  const num::ParamStore& params() const noexcept { return *store_; }
  const features::EntityEmbedder& embedder() const noexcept { return *embedder_; }
  const defum::Defum& defum() const noexcept { return *defum_; }
  const sgam::SemanticAlignment& alignment() const noexcept { return *alignment_; }

 private:
  ModelConfig config_;
  ingest::Vocabulary vocab_;
  std::unique_ptr<num::ParamStore> store_;
  std::unique_ptr<features::EntityEmbedder> embedder_;
  std::unique_ptr<defum::Defum> defum_;
  std::unique_ptr<sgam::SemanticAlignment> alignment_;
  std::vector<num::EncoderLayerParams> mmt_layers_;
  num::Parameter* word_embedding_ = nullptr;      // |V| x t
  num::Parameter* position_embedding_ = nullptr;  // max_len x t
  num::Parameter* vocab_weight_ = nullptr;        // t x |V|
  num::Parameter* vocab_bias_ = nullptr;          // 1 x |V|
  num::Parameter* pointer_weight_ = nullptr;      // t x t
  num::Parameter* pointer_bias_ = nullptr;        // 1 x 1
};

}  // namespace depthcap::cap
