#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "depthcap/diagnostics.hpp"

namespace depthcap::ingest {

inline constexpr std::size_t kSubwordDim = 300;

// Word -> subword vector table. Keys are case-folded to lowercase; iteration
// order is first-insertion order.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim = kSubwordDim) : dim_(dim) {}

  // Returns true when an existing entry was replaced.
  bool insert(std::string_view word, std::vector<double> vec);

  const std::vector<double>* find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word) != nullptr; }

  // Vector for a (possibly multi-word) token: the mean of its space-separated
  // words. Missing words throw OovError unless allow_oov, in which case they
  // contribute the zero vector and a warning is emitted.
  std::vector<double> lookup(std::string_view token, bool allow_oov = false,
                             const WarningSink& warn = warn_to_stderr) const;

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }

 private:
  std::size_t dim_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

std::string fold_case(std::string_view s);

// Text lines "word v1 ... v<dim>". Wrong arity -> ParseError with line number;
// duplicates -> last wins with a warning.
EmbeddingTable parse_embedding_table(std::istream& in, std::size_t dim = kSubwordDim,
                                     const WarningSink& warn = warn_to_stderr);
EmbeddingTable load_embedding_table(const std::filesystem::path& path, std::size_t dim = kSubwordDim,
                                    const WarningSink& warn = warn_to_stderr);
void save_embedding_table(const std::filesystem::path& path, const EmbeddingTable& table);

}  // namespace depthcap::ingest
