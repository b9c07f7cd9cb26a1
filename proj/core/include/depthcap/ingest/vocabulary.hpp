#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace depthcap::ingest {

// Fixed output vocabulary. Indices 0..3 are reserved for <pad>, <s>, </s>, <unk>.
class Vocabulary {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kBos = 1;
  static constexpr std::size_t kEos = 2;
  static constexpr std::size_t kUnk = 3;
  static constexpr std::size_t kReservedCount = 4;

  Vocabulary();
  // `words` must start with the four reserved tokens and be unique.
  explicit Vocabulary(std::vector<std::string> words);
  // Prepends the reserved tokens to `ordinary`.
  static Vocabulary from_ordinary_words(const std::vector<std::string>& ordinary);

  std::optional<std::size_t> index_of(std::string_view word) const;
  const std::string& word(std::size_t index) const;
  std::size_t size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.words_ == b.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

const std::vector<std::string>& reserved_tokens();

// One word per line. Throws ParseError / ValidationError with line numbers.
Vocabulary load_vocabulary(const std::filesystem::path& path);
void save_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab);

}  // namespace depthcap::ingest
