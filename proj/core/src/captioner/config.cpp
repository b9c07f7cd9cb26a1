#include "depthcap/captioner/config.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "depthcap/errors.hpp"

namespace depthcap::cap {

using json = nlohmann::ordered_json;

void validate(const ModelConfig& c) {
  if (c.t == 0) throw ArgumentError("config: t must be positive");
  if (c.heads == 0 || c.t % c.heads != 0) {
    throw ArgumentError("config: heads (" + std::to_string(c.heads) + ") must divide t (" + std::to_string(c.t) + ")");
  }
  if (c.mmt_layers == 0) throw ArgumentError("config: mmt_layers must be positive");
  if (c.defum_layers == 0) throw ArgumentError("config: defum_layers must be positive");
  if (c.defum_heads == 0 || c.depth_heads == 0) throw ArgumentError("config: head counts must be positive");
  if (c.appearance_dim != 0 && (c.appearance_dim % c.defum_heads != 0 || c.appearance_dim % c.depth_heads != 0)) {
    throw ArgumentError("config: DeFUM head counts must divide the appearance width " +
                        std::to_string(c.appearance_dim));
  }
  if (c.K == 0) throw ArgumentError("config: K must be positive");
  if (c.max_len == 0) throw ArgumentError("config: max_len must be positive");
  if (!(c.lr > 0.0)) throw ArgumentError("config: lr must be positive");
  if (!(c.lr_decay_factor > 0.0)) throw ArgumentError("config: lr_decay_factor must be positive");
  if (c.batch_size == 0) throw ArgumentError("config: batch_size must be positive");
}

ModelConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config: expected a JSON object");
  static const std::set<std::string> known = {
      "t",          "heads",   "mmt_layers",  "defum_layers", "defum_heads",     "depth_heads",
      "K",          "max_len", "vocab_path",  "seed",         "lr",              "lr_decay_step",
      "lr_decay_factor", "steps", "batch_size", "sgam_axis",  "prefer_copy",     "allow_oov",
      "zero_heads", "appearance_dim"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ArgumentError("config: unknown key '" + key + "'");
  }
  ModelConfig c;
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    get("t", c.t);
    get("heads", c.heads);
    get("mmt_layers", c.mmt_layers);
    get("defum_layers", c.defum_layers);
    get("defum_heads", c.defum_heads);
    get("depth_heads", c.depth_heads);
    get("K", c.K);
    get("max_len", c.max_len);
    get("vocab_path", c.vocab_path);
    get("seed", c.seed);
    get("lr", c.lr);
    get("lr_decay_step", c.lr_decay_step);
    get("lr_decay_factor", c.lr_decay_factor);
    get("steps", c.steps);
    get("batch_size", c.batch_size);
    get("prefer_copy", c.prefer_copy);
    get("allow_oov", c.allow_oov);
    get("zero_heads", c.zero_heads);
    get("appearance_dim", c.appearance_dim);
    if (j.contains("sgam_axis")) c.sgam_axis = sgam::softmax_axis_from_string(j.at("sgam_axis").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

ModelConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string to_json(const ModelConfig& c) {
  json j;
  j["t"] = c.t;
  j["heads"] = c.heads;
  j["mmt_layers"] = c.mmt_layers;
  j["defum_layers"] = c.defum_layers;
  j["defum_heads"] = c.defum_heads;
  j["depth_heads"] = c.depth_heads;
  j["K"] = c.K;
  j["max_len"] = c.max_len;
  j["vocab_path"] = c.vocab_path;
  j["seed"] = c.seed;
  j["lr"] = c.lr;
  j["lr_decay_step"] = c.lr_decay_step;
  j["lr_decay_factor"] = c.lr_decay_factor;
  j["steps"] = c.steps;
  j["batch_size"] = c.batch_size;
  j["sgam_axis"] = sgam::to_string(c.sgam_axis);
  j["prefer_copy"] = c.prefer_copy;
  j["allow_oov"] = c.allow_oov;
  j["zero_heads"] = c.zero_heads;
  j["appearance_dim"] = c.appearance_dim;
  return j.dump(2);
}

ModelConfig desk_config() {
  ModelConfig c;
  c.t = 32;
  c.heads = 2;
  c.mmt_layers = 2;
  c.defum_layers = 1;
  c.defum_heads = 1;
  c.depth_heads = 1;
  c.K = 5;
  c.max_len = 30;
  c.lr = 1e-3;
  c.steps = 600;
  c.batch_size = 8;
  return c;
}

}  // namespace depthcap::cap
