#include "depthcap/ingest/depth_map.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <iterator>

#include "depthcap/errors.hpp"

namespace depthcap::ingest {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }

class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  std::size_t read_number(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_) throw FormatError(std::string("PGM header: expected ") + what);
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(bytes_.data() + start, bytes_.data() + pos_, value);
    if (ec != std::errc()) throw FormatError(std::string("PGM header: bad ") + what);
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void expect_single_space() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
      throw FormatError("PGM header: missing whitespace before raster");
    }
    ++pos_;
  }

  std::size_t position() const { return pos_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

DepthMap parse_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes.substr(0, 2) != "P5") {
    throw FormatError("not a binary PGM: magic must be P5");
  }
  HeaderReader header(bytes);
  DepthMap map;
  map.width = header.read_number("width");
  map.height = header.read_number("height");
  const std::size_t maxval = header.read_number("maxval");
  if (maxval != 255) throw FormatError("PGM maxval " + std::to_string(maxval) + " unsupported (need 255)");
  if (map.width == 0 || map.height == 0) throw FormatError("PGM has zero size");
  header.expect_single_space();

  const std::size_t expected = map.width * map.height;
  const std::size_t available = bytes.size() - header.position();
  if (available < expected) {
    throw ParseError("PGM raster truncated: " + std::to_string(available) + " of " +
                     std::to_string(expected) + " bytes");
  }
  if (available > expected) {
    throw ParseError("PGM has " + std::to_string(available - expected) + " trailing bytes");
  }
  const auto* raster = reinterpret_cast<const std::uint8_t*>(bytes.data() + header.position());
  map.values.assign(raster, raster + expected);
  return map;
}

std::string encode_pgm(const DepthMap& map) {
  if (map.values.size() != map.width * map.height) {
    throw ShapeError("depth map raster length does not match " + std::to_string(map.width) + "x" +
                     std::to_string(map.height));
  }
  std::string out = "P5\n" + std::to_string(map.width) + " " + std::to_string(map.height) + "\n255\n";
  out.append(map.values.begin(), map.values.end());
  return out;
}

DepthMap load_depth_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open depth map '" + path.string() + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_pgm(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_depth_map(const std::filesystem::path& path, const DepthMap& map) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot write depth map '" + path.string() + "'");
  const std::string bytes = encode_pgm(map);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace depthcap::ingest
