#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <string>
#include <string_view>

#include "depthcap/numerics/matrix.hpp"

namespace depthcap::features {

inline constexpr std::size_t kPhocAlphabetSize = 36;  // a-z, 0-9
inline constexpr std::size_t kPhocBigramCount = 50;
inline constexpr std::size_t kPhocUnigramBits = kPhocAlphabetSize * (2 + 3 + 4 + 5);  // 504
inline constexpr std::size_t kPhocBigramBits = kPhocBigramCount * 2;                  // 100
inline constexpr std::size_t kPhocDim = kPhocUnigramBits + kPhocBigramBits;            // 604

// The 50 most frequent English bigrams, in the order their bits appear.
extern const std::array<std::string_view, kPhocBigramCount> kPhocBigrams;

// Pyramidal histogram of characters.
//
// Layout: unigram levels 2, 3, 4, 5 in that order; within a level, region
// r occupies bits [36r, 36r + 36) indexed by alphabet position (a-z then
// 0-9). Bits 504..603 are the level-2 bigram histogram: region r occupies
// [504 + 50r, 504 + 50r + 50) indexed by kPhocBigrams.
//
// Character k of an n-character word spans [k/n, (k+1)/n); region r of
// level L spans [r/L, (r+1)/L). A bit is set when the overlap is at least
// half of the character's (or bigram's) extent, boundary inclusive.
using PhocVector = std::bitset<kPhocDim>;

// Lowercases and drops characters outside [a-z0-9]. Throws ArgumentError
// ("unrepresentable token") if nothing remains.
std::string phoc_normalize(std::string_view token);
PhocVector phoc(std::string_view token);

// Bit offset of (level, region, symbol) in the unigram section.
std::size_t phoc_unigram_bit(std::size_t level, std::size_t region, std::size_t symbol);

num::Matrix phoc_row(const PhocVector& v);

}  // namespace depthcap::features
