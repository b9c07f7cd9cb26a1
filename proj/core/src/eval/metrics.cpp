#include "depthcap/eval/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "depthcap/errors.hpp"

namespace depthcap::eval {

namespace {

constexpr std::size_t kMaxN = 4;

// n-grams keyed by their tokens joined with a separator that cannot occur
// inside a token.
using NgramCounts = std::unordered_map<std::string, double>;

std::array<NgramCounts, kMaxN> count_ngrams(const Tokens& tokens) {
  std::array<NgramCounts, kMaxN> out;
  for (std::size_t n = 1; n <= kMaxN; ++n) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string key = tokens[i];
      for (std::size_t k = 1; k < n; ++k) {
        key += ' ';
        key += tokens[i + k];
      }
      out[n - 1][key] += 1.0;
    }
  }
  return out;
}

}  // namespace

void validate(const Corpus& corpus) {
  if (corpus.empty()) throw ArgumentError("metric over an empty corpus");
  for (const auto& [id, entry] : corpus) {
    if (entry.references.empty()) throw ArgumentError("record '" + id + "' has no reference caption");
  }
}

double brevity_penalty(std::size_t c, std::size_t r) {
  if (c == 0) return 0.0;
  if (c >= r) return 1.0;
  return std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
}

double bleu4(const Corpus& corpus, const BleuOptions& options) {
  validate(corpus);
  std::array<double, kMaxN> matched{};
  std::array<double, kMaxN> possible{};
  std::size_t cand_len = 0;
  std::size_t ref_len = 0;

  for (const auto& [id, entry] : corpus) {
    const std::size_t c = entry.candidate.size();
    cand_len += c;
    std::size_t best = entry.references.front().size();
    for (const auto& ref : entry.references) {
      const auto d = [c](std::size_t len) { return len > c ? len - c : c - len; };
      if (d(ref.size()) < d(best) || (d(ref.size()) == d(best) && ref.size() < best)) best = ref.size();
    }
    ref_len += best;

    const auto cand = count_ngrams(entry.candidate);
    std::array<NgramCounts, kMaxN> max_ref;
    for (const auto& ref : entry.references) {
      const auto counts = count_ngrams(ref);
      for (std::size_t n = 0; n < kMaxN; ++n) {
        for (const auto& [g, k] : counts[n]) max_ref[n][g] = std::max(max_ref[n][g], k);
      }
    }
    for (std::size_t n = 0; n < kMaxN; ++n) {
      for (const auto& [g, k] : cand[n]) {
        auto it = max_ref[n].find(g);
        if (it != max_ref[n].end()) matched[n] += std::min(k, it->second);
      }
      if (c > n) possible[n] += static_cast<double>(c - n);
    }
  }

  double log_sum = 0.0;
  for (std::size_t n = 0; n < kMaxN; ++n) {
    double num = matched[n];
    double den = possible[n];
    if (options.smooth && n > 0) {
      num += 1.0;
      den += 1.0;
    }
    if (num == 0.0 || den == 0.0) return 0.0;
    log_sum += std::log(num / den);
  }
  return brevity_penalty(cand_len, ref_len) * std::exp(log_sum / static_cast<double>(kMaxN));
}

namespace {

struct TfIdf {
  std::array<NgramCounts, kMaxN> vec;
  std::array<double, kMaxN> norm{};
  std::size_t length = 0;
};

TfIdf weigh(const Tokens& tokens, const std::unordered_map<std::string, double>& df, double log_images) {
  TfIdf out;
  out.length = tokens.size();
  auto counts = count_ngrams(tokens);
  for (std::size_t n = 0; n < kMaxN; ++n) {
    for (auto& [g, tf] : counts[n]) {
      auto it = df.find(g);
      const double d = std::log(std::max(1.0, it == df.end() ? 0.0 : it->second));
      const double w = tf * (log_images - d);
      out.vec[n][g] = w;
      out.norm[n] += w * w;
    }
    out.norm[n] = std::sqrt(out.norm[n]);
  }
  return out;
}

double similarity(const TfIdf& hyp, const TfIdf& ref, double sigma) {
  const double delta = static_cast<double>(hyp.length) - static_cast<double>(ref.length);
  const double penalty = std::exp(-(delta * delta) / (2.0 * sigma * sigma));
  double total = 0.0;
  for (std::size_t n = 0; n < kMaxN; ++n) {
    double v = 0.0;
    for (const auto& [g, w] : hyp.vec[n]) {
      auto it = ref.vec[n].find(g);
      if (it != ref.vec[n].end()) v += std::min(w, it->second) * it->second;
    }
    if (hyp.norm[n] != 0.0 && ref.norm[n] != 0.0) v /= hyp.norm[n] * ref.norm[n];
    total += v * penalty;
  }
  return total / static_cast<double>(kMaxN);
}

}  // namespace

double cider_d(const Corpus& corpus, const CiderOptions& options) {
  validate(corpus);
  if (corpus.size() < 2 && !options.idf_from_refs_only) {
    throw ArgumentError("CIDEr-D needs at least two images for document frequencies");
  }
  std::unordered_map<std::string, double> df;
  for (const auto& [id, entry] : corpus) {
    std::unordered_set<std::string> seen;
    for (const auto& ref : entry.references) {
      for (auto& counts : count_ngrams(ref)) {
        for (auto& [g, k] : counts) seen.insert(g);
      }
    }
    for (const auto& g : seen) df[g] += 1.0;
  }
  const double log_images = std::log(static_cast<double>(corpus.size()));

  double sum = 0.0;
  for (const auto& [id, entry] : corpus) {
    const TfIdf hyp = weigh(entry.candidate, df, log_images);
    double score = 0.0;
    for (const auto& ref : entry.references) score += similarity(hyp, weigh(ref, df, log_images), options.sigma);
    sum += 10.0 * score / static_cast<double>(entry.references.size());
  }
  return sum / static_cast<double>(corpus.size());
}

}  // namespace depthcap::eval
