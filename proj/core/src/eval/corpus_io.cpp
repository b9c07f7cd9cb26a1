#include "depthcap/eval/corpus_io.hpp"

#include <fstream>
#include <istream>
#include <json.hpp>

#include "depthcap/errors.hpp"
#include "depthcap/eval/tokenize.hpp"

namespace depthcap::eval {

CaptionTable parse_caption_jsonl(std::istream& in) {
  CaptionTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
      throw ParseError("expected an object with a string 'id'", line_no);
    }
    const bool single = j.contains("caption");
    const bool multi = j.contains("captions");
    if (single == multi) throw ParseError("expected exactly one of 'caption' or 'captions'", line_no);
    std::vector<std::string> captions;
    if (single) {
      if (!j["caption"].is_string()) throw ParseError("'caption' must be a string", line_no);
      captions.push_back(j["caption"].get<std::string>());
    } else {
      if (!j["captions"].is_array() || j["captions"].empty()) {
        throw ParseError("'captions' must be a non-empty array", line_no);
      }
      for (const auto& c : j["captions"]) {
        if (!c.is_string()) throw ParseError("'captions' entries must be strings", line_no);
        captions.push_back(c.get<std::string>());
      }
    }
    const std::string id = j["id"].get<std::string>();
    if (!table.emplace(id, std::move(captions)).second) throw ParseError("repeated id '" + id + "'", line_no);
  }
  return table;
}

CaptionTable load_caption_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open '" + path.string() + "'");
  try {
    return parse_caption_jsonl(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Corpus build_corpus(const CaptionTable& predictions, const CaptionTable& references) {
  Corpus corpus;
  for (const auto& [id, captions] : predictions) {
    if (captions.size() != 1) throw ValidationError("prediction '" + id + "' must have exactly one caption");
    auto ref = references.find(id);
    if (ref == references.end()) throw ValidationError("prediction '" + id + "' has no reference");
    CorpusEntry entry{tokenize(captions.front()), {}};
    for (const auto& r : ref->second) entry.references.push_back(tokenize(r));
    corpus.emplace(id, std::move(entry));
  }
  for (const auto& [id, captions] : references) {
    if (!predictions.contains(id)) throw ValidationError("reference '" + id + "' has no prediction");
  }
  return corpus;
}

}  // namespace depthcap::eval
