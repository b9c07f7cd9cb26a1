#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>

#include "depthcap/captioner/model.hpp"

namespace depthcap::cap {

inline constexpr char kCheckpointMagic[8] = {'D', 'E', 'P', 'T', 'H', 'C', 'A', 'P'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Little-endian binary layout:
//   magic[8] u32 version
//   u64 len, config JSON
//   u64 vocab size, then (u64 len, bytes) per word
//   u64 parameter count, then per parameter in registration order:
//     u64 len, name, u64 rows, u64 cols, rows*cols IEEE-754 doubles
void write_checkpoint(std::ostream& out, const CaptionModel& model);
void save_checkpoint(const std::filesystem::path& path, const CaptionModel& model);

// Rebuilds the model from its stored config and vocabulary, then overwrites
// every parameter. Throws FormatError on any mismatch.
std::unique_ptr<CaptionModel> read_checkpoint(std::istream& in);
std::unique_ptr<CaptionModel> load_checkpoint(const std::filesystem::path& path);

}  // namespace depthcap::cap
