#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace depthcap::ingest {

// 8-bit grayscale depth raster; 0 is nearest to the camera.
struct DepthMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> values;  // row-major

  std::uint8_t at(std::size_t x, std::size_t y) const { return values[y * width + x]; }

  friend bool operator==(const DepthMap&, const DepthMap&) = default;
};

// Binary PGM (P5, maxval 255) only. Header comments are accepted.
// Throws FormatError for a bad header and ParseError for a short raster.
DepthMap parse_pgm(std::string_view bytes);
std::string encode_pgm(const DepthMap& map);

DepthMap load_depth_map(const std::filesystem::path& path);
void save_depth_map(const std::filesystem::path& path, const DepthMap& map);

}  // namespace depthcap::ingest
