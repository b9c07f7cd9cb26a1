#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "depthcap/sgam/sgam.hpp"

namespace depthcap::cap {

// Model and training configuration. Defaults are the full-scale settings;
// desk-scale runs override them from a JSON config file.
struct ModelConfig {
  std::size_t t = 768;  // common embedding width
  std::size_t heads = 12;
  std::size_t mmt_layers = 4;
  std::size_t defum_layers = 2;
  std::size_t defum_heads = 1;
  std::size_t depth_heads = 1;
  std::size_t K = sgam::kDefaultTopK;
  std::size_t max_len = 30;
  std::string vocab_path = "vocab.txt";
  std::uint64_t seed = 1;
  double lr = 1e-4;
  std::size_t lr_decay_step = 0;  // 0 disables the decay
  double lr_decay_factor = 0.1;
  std::size_t steps = 100;
  std::size_t batch_size = 8;
  sgam::SoftmaxAxis sgam_axis = sgam::SoftmaxAxis::Concepts;
  bool prefer_copy = false;
  bool allow_oov = false;
  bool zero_heads = false;
  // Appearance feature width d; 0 means "take it from the data".
  std::size_t appearance_dim = 0;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Throws ArgumentError on an inconsistent configuration.
void validate(const ModelConfig& config);

// Unknown keys are rejected. Missing keys keep their defaults.
ModelConfig config_from_json(const std::string& text);
ModelConfig load_config(const std::filesystem::path& path);
std::string to_json(const ModelConfig& config);

// A small configuration that trains in seconds on the synthetic fixtures.
ModelConfig desk_config();

}  // namespace depthcap::cap
