#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace depthcap::eval {

using Tokens = std::vector<std::string>;

struct CorpusEntry {
  Tokens candidate;
  std::vector<Tokens> references;  // at least one
};

// Keyed by record id; ordered so every computation is reproducible.
using Corpus = std::map<std::string, CorpusEntry>;

// Throws ArgumentError if the corpus is empty or an id has no reference.
void validate(const Corpus& corpus);

struct BleuOptions {
  // Add-one smoothing of the 2..4-gram precisions.
  bool smooth = false;
};

// min(1, exp(1 - r/c)); 0 when c == 0.
double brevity_penalty(std::size_t candidate_length, std::size_t reference_length);

// Corpus-level BLEU-4: clipped n-gram precisions pooled over the corpus,
// geometric mean, brevity penalty against the closest reference length
// (shorter wins a tie).
double bleu4(const Corpus& corpus, const BleuOptions& options = {});

struct CiderOptions {
  double sigma = 6.0;
  // Permit a single-image corpus. Document frequencies still come from the
  // references only; with one image every idf weight is zero.
  bool idf_from_refs_only = false;
};

// CIDEr-D: tf-idf n-gram vectors (n = 1..4, idf over each image's reference
// set), clipped cosine, gaussian length penalty, averaged over n and
// references, times 10, then averaged over images.
double cider_d(const Corpus& corpus, const CiderOptions& options = {});

}  // namespace depthcap::eval
