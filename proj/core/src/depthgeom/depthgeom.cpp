#include "depthcap/depthgeom/depthgeom.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "depthcap/errors.hpp"

namespace depthcap::geom {

PixelRect pixel_coverage(const ingest::Box& box, std::size_t width, std::size_t height) {
  const auto wd = static_cast<double>(width);
  const auto hd = static_cast<double>(height);
  if (box.x_tl < 0.0 || box.y_tl < 0.0 || box.x_br > wd || box.y_br > hd) {
    throw ArgumentError("box exceeds depth map bounds " + std::to_string(width) + "x" + std::to_string(height));
  }
  PixelRect r;
  r.x0 = static_cast<std::size_t>(std::floor(box.x_tl));
  r.y0 = static_cast<std::size_t>(std::floor(box.y_tl));
  r.x1 = static_cast<std::size_t>(std::ceil(box.x_br));
  r.y1 = static_cast<std::size_t>(std::ceil(box.y_br));
  return r;
}

DepthValue depth_value_of_region(const ingest::DepthMap& map, const ingest::Box& box) {
  const PixelRect r = pixel_coverage(box, map.width, map.height);
  if (r.x1 <= r.x0 || r.y1 <= r.y0) {
    throw DegenerateBoxError("box covers no pixels");
  }
  std::array<std::size_t, 256> histogram{};
  for (std::size_t y = r.y0; y < r.y1; ++y)
    for (std::size_t x = r.x0; x < r.x1; ++x) ++histogram[map.at(x, y)];
  // max_element returns the first maximum, i.e. the smallest gray value.
  const auto mode = std::max_element(histogram.begin(), histogram.end()) - histogram.begin();
  return DepthValue{static_cast<std::uint8_t>(mode)};
}

SpatialFeature spatial_feature(const ingest::Box& box, DepthValue dv, std::size_t width, std::size_t height) {
  if (width == 0 || height == 0) throw ArgumentError("spatial_feature: zero image size");
  const auto w = static_cast<double>(width);
  const auto h = static_cast<double>(height);
  return {box.x_tl / w, box.y_tl / h, box.x_br / w, box.y_br / h, static_cast<double>(dv.value) / 255.0};
}

num::Matrix relative_depth_matrix(std::span<const DepthValue> depths) {
  if (depths.empty()) throw ArgumentError("relative_depth_matrix: no depth values");
  const std::size_t n = depths.size();
  std::vector<double> log_depth(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_depth[i] = std::log(static_cast<double>(std::max<std::uint8_t>(depths[i].value, 1)));
  }
  num::Matrix r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // ln(a/b) = ln a - ln b; computing one side and negating keeps R
      // bit-exactly antisymmetric.
      const double v = log_depth[j] - log_depth[i];
      r(i, j) = v;
      r(j, i) = -v;
    }
  }
  return r;
}

}  // namespace depthcap::geom
