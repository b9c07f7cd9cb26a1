#include "depthcap/sgam/sgam.hpp"

#include <algorithm>
#include <cmath>

#include "depthcap/errors.hpp"

namespace depthcap::sgam {

using num::Matrix;
using num::Var;

ConceptSet select_concepts(const std::vector<ingest::ConceptCandidate>& candidates, std::size_t k,
                           const ingest::EmbeddingTable& table, bool allow_oov, const WarningSink& warn) {
  if (k == 0) throw ArgumentError("select_concepts: K must be at least 1");
  if (candidates.size() > ingest::kMaxConceptCandidates) {
    throw ArgumentError("select_concepts: " + std::to_string(candidates.size()) +
                        " candidates exceed the limit of " + std::to_string(ingest::kMaxConceptCandidates));
  }
  for (const auto& c : candidates) {
    if (!std::isfinite(c.score)) throw ArgumentError("select_concepts: non-finite score for '" + c.word + "'");
  }
  std::vector<ingest::ConceptCandidate> sorted = candidates;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.word < b.word;
  });
  sorted.resize(std::min(k, sorted.size()));
  ConceptSet out;
  out.reserve(sorted.size());
  for (const auto& c : sorted) out.push_back({c.word, c.score, table.lookup(c.word, allow_oov, warn)});
  return out;
}

SemanticAlignment::SemanticAlignment(num::ParamStore& store, SoftmaxAxis axis, std::size_t dim)
    : dim_(dim), axis_(axis) {
  query_ = &store.add("sgam.wq", dim, dim, num::Init::Xavier);
  key_ = &store.add("sgam.wk", dim, dim, num::Init::Xavier);
}

Var SemanticAlignment::align(Var concepts, Var tokens) const {
  if (concepts.rows() == 0 || tokens.rows() == 0) {
    throw ShapeError("SemanticAlignment: need at least one concept and one token");
  }
  if (concepts.cols() != dim_ || tokens.cols() != dim_) {
    throw ShapeError("SemanticAlignment: concepts " + concepts.value().shape_string() + " and tokens " +
                     tokens.value().shape_string() + " must have width " + std::to_string(dim_));
  }
  num::Tape& t = *concepts.tape;
  Var q = num::matmul(concepts, t.parameter(*query_));
  Var k = num::matmul(tokens, t.parameter(*key_));
  Var scores = num::scale(num::matmul_nt(q, k), 1.0 / std::sqrt(static_cast<double>(dim_)));  // K x M
  // weights is M x K either way: row m holds token m's weight on each concept.
  Var weights = axis_ == SoftmaxAxis::Tokens ? num::transpose(num::softmax_rows(scores))
                                             : num::softmax_rows(num::transpose(scores));
  Var injected = num::matmul(weights, concepts);  // M x dim
  return num::l2_normalize_rows(num::add(tokens, injected));
}

Matrix SemanticAlignment::align(const Matrix& concepts, const Matrix& tokens) const {
  num::Tape t;
  return align(t.constant(concepts), t.constant(tokens)).value();
}

std::string to_string(SoftmaxAxis axis) { return axis == SoftmaxAxis::Tokens ? "tokens" : "concepts"; }

SoftmaxAxis softmax_axis_from_string(const std::string& name) {
  if (name == "tokens") return SoftmaxAxis::Tokens;
  if (name == "concepts") return SoftmaxAxis::Concepts;
  throw ArgumentError("unknown SgAM softmax axis '" + name + "' (expected 'concepts' or 'tokens')");
}

}  // namespace depthcap::sgam
