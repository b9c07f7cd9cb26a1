#include "depthcap/ingest/embedding_table.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "depthcap/errors.hpp"

namespace depthcap::ingest {

std::string fold_case(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
  });
  return out;
}

bool EmbeddingTable::insert(std::string_view word, std::vector<double> vec) {
  if (vec.size() != dim_) {
    throw ShapeError("embedding for '" + std::string(word) + "' has length " +
                     std::to_string(vec.size()) + ", expected " + std::to_string(dim_));
  }
  std::string key = fold_case(word);
  auto [it, inserted] = vectors_.insert_or_assign(key, std::move(vec));
  if (inserted) words_.push_back(std::move(key));
  return !inserted;
}

const std::vector<double>* EmbeddingTable::find(std::string_view word) const {
  auto it = vectors_.find(fold_case(word));
  return it == vectors_.end() ? nullptr : &it->second;
}

std::vector<double> EmbeddingTable::lookup(std::string_view token, bool allow_oov,
                                           const WarningSink& warn) const {
  std::vector<double> acc(dim_, 0.0);
  std::size_t words = 0;
  std::size_t pos = 0;
  while (pos < token.size()) {
    const std::size_t start = token.find_first_not_of(' ', pos);
    if (start == std::string_view::npos) break;
    std::size_t end = token.find(' ', start);
    if (end == std::string_view::npos) end = token.size();
    const std::string_view word = token.substr(start, end - start);
    ++words;
    if (const auto* vec = find(word)) {
      for (std::size_t i = 0; i < dim_; ++i) acc[i] += (*vec)[i];
    } else if (allow_oov) {
      if (warn) warn("'" + std::string(word) + "' missing from embedding table; using zero vector");
    } else {
      throw OovError("'" + std::string(word) + "' missing from embedding table");
    }
    pos = end;
  }
  if (words == 0) throw OovError("cannot embed an empty token");
  if (words > 1) {
    for (double& v : acc) v /= static_cast<double>(words);
  }
  return acc;
}

EmbeddingTable parse_embedding_table(std::istream& in, std::size_t dim, const WarningSink& warn) {
  EmbeddingTable table(dim);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string word;
    fields >> word;
    std::vector<double> vec;
    vec.reserve(dim);
    std::string tok;
    while (fields >> tok) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        throw ParseError("bad number '" + tok + "' for word '" + word + "'", line_no);
      }
      vec.push_back(v);
    }
    if (vec.size() != dim) {
      throw ParseError("word '" + word + "' has " + std::to_string(vec.size()) + " values, expected " +
                           std::to_string(dim),
                       line_no);
    }
    if (table.insert(word, std::move(vec)) && warn) {
      warn("line " + std::to_string(line_no) + ": duplicate word '" + word + "'; keeping the last entry");
    }
  }
  return table;
}

EmbeddingTable load_embedding_table(const std::filesystem::path& path, std::size_t dim,
                                    const WarningSink& warn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open embedding table '" + path.string() + "'");
  return parse_embedding_table(in, dim, warn);
}

void save_embedding_table(const std::filesystem::path& path, const EmbeddingTable& table) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot write embedding table '" + path.string() + "'");
  std::array<char, 64> buf{};
  for (const auto& word : table.words()) {
    out << word;
    for (double v : *table.find(word)) {
      auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
      out << ' ';
      out.write(buf.data(), ptr - buf.data());
    }
    out << '\n';
  }
}

}  // namespace depthcap::ingest
