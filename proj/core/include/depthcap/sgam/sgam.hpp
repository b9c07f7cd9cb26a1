#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "depthcap/ingest/embedding_table.hpp"
#include "depthcap/ingest/scene.hpp"
#include "depthcap/numerics/transformer.hpp"

namespace depthcap::sgam {

inline constexpr std::size_t kDefaultTopK = 5;

struct Concept {
  std::string word;
  double score = 0.0;
  std::vector<double> subword;
};

// Sorted by score descending, ties by word ascending; at most K entries.
using ConceptSet = std::vector<Concept>;

// Top-min(K, |candidates|) candidates, each resolved to its subword vector.
// Short lists are not padded. A word missing from the table throws OovError
// unless allow_oov (zero vector plus a warning).
ConceptSet select_concepts(const std::vector<ingest::ConceptCandidate>& candidates, std::size_t k,
                           const ingest::EmbeddingTable& table, bool allow_oov = false,
                           const WarningSink& warn = warn_to_stderr);

// Which axis of the K x M concept/token score matrix is normalized.
enum class SoftmaxAxis {
  // Each token distributes unit weight over the concepts.
  Concepts,
  // Each concept distributes unit weight over the tokens.
  Tokens,
};

// Semantic-guided alignment of OCR subword vectors with concept vectors:
//   scores = (C W_QS)(X W_KS)^T / sqrt(300)          (K x M)
//   S      = softmax of scores along the chosen axis
//   X'     = L2Norm(X + S^T C)                        (M x 300, row-wise)
class SemanticAlignment {
 public:
  SemanticAlignment(num::ParamStore& store, SoftmaxAxis axis = SoftmaxAxis::Concepts,
                    std::size_t dim = ingest::kSubwordDim);

  num::Var align(num::Var concepts, num::Var tokens) const;
  num::Matrix align(const num::Matrix& concepts, const num::Matrix& tokens) const;

  SoftmaxAxis axis() const noexcept { return axis_; }
  num::Parameter& query_weight() const noexcept { return *query_; }
  num::Parameter& key_weight() const noexcept { return *key_; }

 private:
  std::size_t dim_;
  SoftmaxAxis axis_;
  num::Parameter* query_;
  num::Parameter* key_;
};

std::string to_string(SoftmaxAxis axis);
SoftmaxAxis softmax_axis_from_string(const std::string& name);

}  // namespace depthcap::sgam
