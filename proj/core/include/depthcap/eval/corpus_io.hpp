#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "depthcap/eval/metrics.hpp"

namespace depthcap::eval {

// id -> raw caption strings, from JSONL lines of the form
// {"id": ..., "caption": "..."} or {"id": ..., "captions": ["...", ...]}.
using CaptionTable = std::map<std::string, std::vector<std::string>>;

// Throws ParseError (with line numbers) on malformed lines or repeated ids.
CaptionTable parse_caption_jsonl(std::istream& in);
CaptionTable load_caption_jsonl(const std::filesystem::path& path);

// Each prediction id needs exactly one caption and a reference entry; every
// reference id needs a prediction. Captions are tokenized.
Corpus build_corpus(const CaptionTable& predictions, const CaptionTable& references);

}  // namespace depthcap::eval
