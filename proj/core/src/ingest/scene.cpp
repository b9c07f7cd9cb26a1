#include "depthcap/ingest/scene.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "depthcap/errors.hpp"

namespace depthcap::ingest {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void invalid(const std::string& id, const std::string& field, const std::string& what) {
  throw ValidationError("record '" + id + "': " + field + ": " + what);
}

void check_box(const std::string& id, const std::string& field, const Box& b, std::size_t w, std::size_t h) {
  const auto wd = static_cast<double>(w);
  const auto hd = static_cast<double>(h);
  if (!(std::isfinite(b.x_tl) && std::isfinite(b.y_tl) && std::isfinite(b.x_br) && std::isfinite(b.y_br))) {
    invalid(id, field, "non-finite coordinate");
  }
  if (!(0.0 <= b.x_tl && b.x_tl < b.x_br && b.x_br <= wd)) {
    invalid(id, field, "x range [" + std::to_string(b.x_tl) + ", " + std::to_string(b.x_br) +
                           ") invalid for width " + std::to_string(w));
  }
  if (!(0.0 <= b.y_tl && b.y_tl < b.y_br && b.y_br <= hd)) {
    invalid(id, field, "y range [" + std::to_string(b.y_tl) + ", " + std::to_string(b.y_br) +
                           ") invalid for height " + std::to_string(h));
  }
}

void check_feat(const std::string& id, const std::string& field, const std::vector<double>& feat,
                std::size_t expected) {
  if (feat.empty()) invalid(id, field, "empty feature vector");
  if (feat.size() != expected) {
    invalid(id, field, "feature length " + std::to_string(feat.size()) + " differs from " +
                           std::to_string(expected));
  }
  for (double v : feat) {
    if (!std::isfinite(v)) invalid(id, field, "non-finite feature value");
  }
}

Box box_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ValidationError("box must be an array of 4 numbers");
  for (const auto& v : j) {
    if (!v.is_number()) throw ValidationError("box must be an array of 4 numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json box_to_json(const Box& b) { return json::array({b.x_tl, b.y_tl, b.x_br, b.y_br}); }

template <typename T>
T required(const json& j, const char* key, const std::string& id) {
  if (!j.contains(key)) invalid(id, key, "missing");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    invalid(id, key, e.what());
  }
}

SceneRecord record_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("record is not a JSON object");
  SceneRecord r;
  r.id = required<std::string>(j, "id", "<unknown>");
  r.width = required<std::size_t>(j, "width", r.id);
  r.height = required<std::size_t>(j, "height", r.id);
  r.depth_map = required<std::string>(j, "depth_map", r.id);
  try {
    for (const auto& o : j.at("objects")) {
      r.objects.push_back({box_from_json(o.at("box")), o.at("feat").get<std::vector<double>>()});
    }
    for (const auto& o : j.at("ocr")) {
      OcrDetection det;
      det.token = o.at("token").get<std::string>();
      det.box = box_from_json(o.at("box"));
      det.feat = o.at("feat").get<std::vector<double>>();
      if (o.contains("conf") && !o.at("conf").is_null()) det.conf = o.at("conf").get<double>();
      r.ocr.push_back(std::move(det));
    }
    if (j.contains("concepts")) {
      for (const auto& c : j.at("concepts")) {
        r.concepts.push_back({c.at("word").get<std::string>(), c.at("score").get<double>()});
      }
    }
    if (j.contains("captions")) r.captions = j.at("captions").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    invalid(r.id, "schema", e.what());
  } catch (const ValidationError& e) {
    invalid(r.id, "box", e.what());
  }
  return r;
}

}  // namespace

void validate(const SceneRecord& r) {
  if (r.id.empty()) invalid(r.id, "id", "empty");
  if (r.width == 0 || r.height == 0) invalid(r.id, "width/height", "must be positive");
  if (r.objects.empty()) invalid(r.id, "objects", "at least 1 object required");
  if (r.objects.size() > kMaxObjects) {
    invalid(r.id, "objects", std::to_string(r.objects.size()) + " entries exceed the limit of " +
                                 std::to_string(kMaxObjects));
  }
  if (r.ocr.empty()) invalid(r.id, "ocr", "at least 1 OCR token required");
  if (r.ocr.size() > kMaxOcrTokens) {
    invalid(r.id, "ocr", std::to_string(r.ocr.size()) + " entries exceed the limit of " +
                             std::to_string(kMaxOcrTokens));
  }
  if (r.concepts.size() > kMaxConceptCandidates) {
    invalid(r.id, "concepts", std::to_string(r.concepts.size()) + " entries exceed the limit of " +
                                  std::to_string(kMaxConceptCandidates));
  }
  const std::size_t d = r.objects.front().feat.size();
  for (std::size_t i = 0; i < r.objects.size(); ++i) {
    const std::string field = "objects[" + std::to_string(i) + "]";
    check_box(r.id, field + ".box", r.objects[i].box, r.width, r.height);
    check_feat(r.id, field + ".feat", r.objects[i].feat, d);
  }
  for (std::size_t i = 0; i < r.ocr.size(); ++i) {
    const std::string field = "ocr[" + std::to_string(i) + "]";
    const auto& o = r.ocr[i];
    if (o.token.empty()) invalid(r.id, field + ".token", "empty");
    check_box(r.id, field + ".box", o.box, r.width, r.height);
    check_feat(r.id, field + ".feat", o.feat, d);
    if (!(o.conf >= 0.0 && o.conf <= 1.0)) {
      invalid(r.id, field + ".conf", "confidence " + std::to_string(o.conf) + " outside [0,1]");
    }
  }
  for (std::size_t i = 0; i < r.concepts.size(); ++i) {
    const std::string field = "concepts[" + std::to_string(i) + "]";
    if (r.concepts[i].word.empty()) invalid(r.id, field + ".word", "empty");
    if (!std::isfinite(r.concepts[i].score)) invalid(r.id, field + ".score", "not finite");
  }
  if (r.depth_map.empty()) invalid(r.id, "depth_map", "empty path");
}

std::vector<SceneRecord> parse_scene_records(std::istream& in) {
  std::vector<SceneRecord> records;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    SceneRecord r;
    try {
      r = record_from_json(j);
      validate(r);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(r.id).second) {
      throw ValidationError("line " + std::to_string(line_no) + ": record '" + r.id + "': id: duplicate");
    }
    if (!records.empty() && r.feature_dim() != records.front().feature_dim()) {
      throw ValidationError("line " + std::to_string(line_no) + ": record '" + r.id +
                            "': feat: dimension " + std::to_string(r.feature_dim()) +
                            " differs from earlier records (" +
                            std::to_string(records.front().feature_dim()) + ")");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<SceneRecord> load_scene_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open scene records '" + path.string() + "'");
  return parse_scene_records(in);
}

std::string to_json_line(const SceneRecord& r) {
  json j;
  j["id"] = r.id;
  j["width"] = r.width;
  j["height"] = r.height;
  json objects = json::array();
  for (const auto& o : r.objects) {
    json e;
    e["box"] = box_to_json(o.box);
    e["feat"] = o.feat;
    objects.push_back(std::move(e));
  }
  j["objects"] = std::move(objects);
  json ocr = json::array();
  for (const auto& o : r.ocr) {
    json e;
    e["token"] = o.token;
    e["box"] = box_to_json(o.box);
    e["feat"] = o.feat;
    e["conf"] = o.conf;
    ocr.push_back(std::move(e));
  }
  j["ocr"] = std::move(ocr);
  json concepts = json::array();
  for (const auto& c : r.concepts) {
    json e;
    e["word"] = c.word;
    e["score"] = c.score;
    concepts.push_back(std::move(e));
  }
  j["concepts"] = std::move(concepts);
  j["captions"] = r.captions;
  j["depth_map"] = r.depth_map;
  return j.dump();
}

void save_scene_records(const std::filesystem::path& path, std::span<const SceneRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot write scene records '" + path.string() + "'");
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

}  // namespace depthcap::ingest
