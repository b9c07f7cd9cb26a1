#include "depthcap/features/phoc.hpp"

#include <algorithm>

#include "depthcap/errors.hpp"

namespace depthcap::features {

const std::array<std::string_view, kPhocBigramCount> kPhocBigrams = {
    "th", "he", "in", "er", "an", "re", "es", "on", "st", "nt", "en", "at", "ed", "nd", "to", "or", "ea",
    "ti", "ar", "te", "ng", "al", "it", "as", "is", "ha", "et", "se", "ou", "of", "le", "sa", "ve", "ro",
    "ra", "ri", "hi", "ne", "me", "de", "co", "ta", "ec", "si", "ll", "so", "na", "li", "la", "el"};

namespace {

constexpr std::size_t kMinLevel = 2;
constexpr std::size_t kMaxLevel = 5;

std::size_t symbol_index(char c) {
  if (c >= 'a' && c <= 'z') return static_cast<std::size_t>(c - 'a');
  return 26 + static_cast<std::size_t>(c - '0');
}

// Overlap of [a0, a1) and [b0, b1) in integer units.
std::size_t overlap(std::size_t a0, std::size_t a1, std::size_t b0, std::size_t b1) {
  const std::size_t lo = std::max(a0, b0);
  const std::size_t hi = std::min(a1, b1);
  return hi > lo ? hi - lo : 0;
}

}  // namespace

std::string phoc_normalize(std::string_view token) {
  std::string out;
  for (char raw : token) {
    char c = raw;
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) out += c;
  }
  if (out.empty()) throw ArgumentError("unrepresentable token '" + std::string(token) + "' for PHOC");
  return out;
}

std::size_t phoc_unigram_bit(std::size_t level, std::size_t region, std::size_t symbol) {
  std::size_t offset = 0;
  for (std::size_t l = kMinLevel; l < level; ++l) offset += l * kPhocAlphabetSize;
  return offset + region * kPhocAlphabetSize + symbol;
}

PhocVector phoc(std::string_view token) {
  const std::string word = phoc_normalize(token);
  const std::size_t n = word.size();
  PhocVector bits;

  // Work in units of 1/(n*L): character k is [kL, (k+1)L), region r is [rn, (r+1)n).
  for (std::size_t level = kMinLevel; level <= kMaxLevel; ++level) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t r = 0; r < level; ++r) {
        const std::size_t ov = overlap(k * level, (k + 1) * level, r * n, (r + 1) * n);
        if (2 * ov >= level) bits.set(phoc_unigram_bit(level, r, symbol_index(word[k])));
      }
    }
  }

  constexpr std::size_t level = 2;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::string_view pair(word.data() + k, 2);
    const auto it = std::find(kPhocBigrams.begin(), kPhocBigrams.end(), pair);
    if (it == kPhocBigrams.end()) continue;
    const auto b = static_cast<std::size_t>(it - kPhocBigrams.begin());
    for (std::size_t r = 0; r < level; ++r) {
      const std::size_t ov = overlap(k * level, (k + 2) * level, r * n, (r + 1) * n);
      if (2 * ov >= 2 * level) bits.set(kPhocUnigramBits + r * kPhocBigramCount + b);
    }
  }
  return bits;
}

num::Matrix phoc_row(const PhocVector& v) {
  num::Matrix row(1, kPhocDim);
  for (std::size_t i = 0; i < kPhocDim; ++i) row(0, i) = v.test(i) ? 1.0 : 0.0;
  return row;
}

}  // namespace depthcap::features
