#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <vector>

namespace depthcap::ingest {

inline constexpr std::size_t kMaxObjects = 100;
inline constexpr std::size_t kMaxOcrTokens = 80;
inline constexpr std::size_t kMaxConceptCandidates = 15;
// Confidence assigned to OCR entries that carry none.
inline constexpr double kDefaultOcrConfidence = 0.9;

// Pixel box, top-left inclusive and bottom-right exclusive.
struct Box {
  double x_tl = 0.0;
  double y_tl = 0.0;
  double x_br = 0.0;
  double y_br = 0.0;

  friend bool operator==(const Box&, const Box&) = default;
};

struct ObjectDetection {
  Box box;
  std::vector<double> feat;

  friend bool operator==(const ObjectDetection&, const ObjectDetection&) = default;
};

struct OcrDetection {
  std::string token;
  Box box;
  std::vector<double> feat;
  double conf = kDefaultOcrConfidence;

  friend bool operator==(const OcrDetection&, const OcrDetection&) = default;
};

struct ConceptCandidate {
  std::string word;
  double score = 0.0;

  friend bool operator==(const ConceptCandidate&, const ConceptCandidate&) = default;
};

struct SceneRecord {
  std::string id;
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<ObjectDetection> objects;
  std::vector<OcrDetection> ocr;
  std::vector<ConceptCandidate> concepts;
  std::vector<std::string> captions;
  // As written in the file; relative paths resolve against the records file.
  std::string depth_map;

  std::size_t feature_dim() const { return objects.empty() ? 0 : objects.front().feat.size(); }

  friend bool operator==(const SceneRecord&, const SceneRecord&) = default;
};

// Throws ValidationError naming the record id and the offending field.
void validate(const SceneRecord& record);

// JSON Lines. Blank lines are skipped; every other line must be one record.
// Throws ParseError (with line number) or ValidationError. All records must
// share one appearance-feature dimension.
std::vector<SceneRecord> parse_scene_records(std::istream& in);
std::vector<SceneRecord> load_scene_records(const std::filesystem::path& path);

std::string to_json_line(const SceneRecord& record);
void save_scene_records(const std::filesystem::path& path, std::span<const SceneRecord> records);

}  // namespace depthcap::ingest
