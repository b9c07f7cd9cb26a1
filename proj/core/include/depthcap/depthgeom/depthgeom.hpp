#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

#include "depthcap/ingest/depth_map.hpp"
#include "depthcap/ingest/scene.hpp"
#include "depthcap/numerics/matrix.hpp"

namespace depthcap::geom {

// Modal gray value of an entity's region; 0 is nearest.
struct DepthValue {
  std::uint8_t value = 0;

  friend bool operator==(const DepthValue&, const DepthValue&) = default;
};

// [x_tl/W, y_tl/H, x_br/W, y_br/H, dv/255]
using SpatialFeature = std::array<double, 5>;

// Pixel columns [floor(x_tl), ceil(x_br)) x rows [floor(y_tl), ceil(y_br)),
// which is the half-open box itself for integer coordinates.
struct PixelRect {
  std::size_t x0 = 0;
  std::size_t y0 = 0;
  std::size_t x1 = 0;
  std::size_t y1 = 0;
};

PixelRect pixel_coverage(const ingest::Box& box, std::size_t width, std::size_t height);

// Most frequent gray value over the covered pixels; ties go to the smaller
// (nearer) value. Throws DegenerateBoxError when nothing is covered and
// ArgumentError when the box leaves the map.
DepthValue depth_value_of_region(const ingest::DepthMap& map, const ingest::Box& box);

SpatialFeature spatial_feature(const ingest::Box& box, DepthValue dv, std::size_t width, std::size_t height);

// R[i][j] = ln(dv_j / dv_i), with depth values clamped to [1, 255] first so
// that gray value 0 stays finite. Exactly antisymmetric with a zero diagonal.
num::Matrix relative_depth_matrix(std::span<const DepthValue> depths);

}  // namespace depthcap::geom
