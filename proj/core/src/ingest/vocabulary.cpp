#include "depthcap/ingest/vocabulary.hpp"

#include <fstream>

#include "depthcap/errors.hpp"

namespace depthcap::ingest {

const std::vector<std::string>& reserved_tokens() {
  static const std::vector<std::string> tokens{"<pad>", "<s>", "</s>", "<unk>"};
  return tokens;
}

Vocabulary::Vocabulary() : Vocabulary(reserved_tokens()) {}

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  const auto& reserved = reserved_tokens();
  if (words_.size() < kReservedCount) {
    throw ValidationError("vocabulary must start with <pad>, <s>, </s>, <unk>");
  }
  for (std::size_t i = 0; i < kReservedCount; ++i) {
    if (words_[i] != reserved[i]) {
      throw ValidationError("vocabulary entry " + std::to_string(i) + " must be '" + reserved[i] +
                            "', found '" + words_[i] + "'");
    }
  }
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i].empty()) throw ValidationError("vocabulary entry " + std::to_string(i) + " is empty");
    if (!index_.emplace(words_[i], i).second) {
      throw ValidationError("vocabulary word '" + words_[i] + "' repeated at entry " + std::to_string(i));
    }
  }
}

Vocabulary Vocabulary::from_ordinary_words(const std::vector<std::string>& ordinary) {
  std::vector<std::string> words = reserved_tokens();
  words.insert(words.end(), ordinary.begin(), ordinary.end());
  return Vocabulary(std::move(words));
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::word(std::size_t index) const {
  if (index >= words_.size()) {
    throw IndexError("vocabulary index " + std::to_string(index) + " out of range " +
                     std::to_string(words_.size()));
  }
  return words_[index];
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open vocabulary '" + path.string() + "'");
  std::vector<std::string> words;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.find_first_of(" \t") != std::string::npos) {
      throw ParseError("vocabulary entry '" + line + "' contains whitespace", line_no);
    }
    words.push_back(line);
  }
  try {
    return Vocabulary(std::move(words));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_vocabulary(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot write vocabulary '" + path.string() + "'");
  for (const auto& w : vocab.words()) out << w << '\n';
}

}  // namespace depthcap::ingest
