#include "depthcap/captioner/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "depthcap/errors.hpp"

namespace depthcap::cap {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

// Guards against absurd lengths in corrupt files.
constexpr std::uint64_t kMaxStringBytes = 1ull << 30;

void put_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
void put_u32(std::ostream& out, std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof v); }
void put_string(std::ostream& out, const std::string& s) {
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void read_exact(std::istream& in, void* dst, std::size_t n, const char* what) {
  in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) throw FormatError(std::string("checkpoint truncated while reading ") + what);
}
std::uint64_t get_u64(std::istream& in, const char* what) {
  std::uint64_t v = 0;
  read_exact(in, &v, sizeof v, what);
  return v;
}
std::string get_string(std::istream& in, const char* what) {
  const std::uint64_t n = get_u64(in, what);
  if (n > kMaxStringBytes) throw FormatError(std::string("checkpoint: implausible length for ") + what);
  std::string s(n, '\0');
  read_exact(in, s.data(), n, what);
  return s;
}

}  // namespace

void write_checkpoint(std::ostream& out, const CaptionModel& model) {
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  put_u32(out, kCheckpointVersion);
  put_string(out, to_json(model.config()));
  const auto& words = model.vocab().words();
  put_u64(out, words.size());
  for (const auto& w : words) put_string(out, w);
  const auto& params = model.params().all();
  put_u64(out, params.size());
  for (const auto& p : params) {
    put_string(out, p.name);
    put_u64(out, p.value.rows());
    put_u64(out, p.value.cols());
    const auto d = p.value.data();
    out.write(reinterpret_cast<const char*>(d.data()), static_cast<std::streamsize>(d.size() * sizeof(double)));
  }
  if (!out) throw Error("checkpoint: write failed");
}

void save_checkpoint(const std::filesystem::path& path, const CaptionModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  write_checkpoint(out, model);
}

std::unique_ptr<CaptionModel> read_checkpoint(std::istream& in) {
  char magic[sizeof kCheckpointMagic];
  read_exact(in, magic, sizeof magic, "magic");
  if (std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) throw FormatError("not a checkpoint file (bad magic)");
  std::uint32_t version = 0;
  read_exact(in, &version, sizeof version, "version");
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  ModelConfig config;
  try {
    config = config_from_json(get_string(in, "config"));
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("checkpoint config: ") + e.what());
  } catch (const ParseError& e) {
    throw FormatError(std::string("checkpoint config: ") + e.what());
  }
  const std::uint64_t vocab_size = get_u64(in, "vocabulary size");
  if (vocab_size > kMaxStringBytes) throw FormatError("checkpoint: implausible vocabulary size");
  std::vector<std::string> words;
  words.reserve(vocab_size);
  for (std::uint64_t i = 0; i < vocab_size; ++i) words.push_back(get_string(in, "vocabulary word"));

  std::unique_ptr<CaptionModel> model;
  try {
    model = std::make_unique<CaptionModel>(config, ingest::Vocabulary(std::move(words)));
  } catch (const ValidationError& e) {
    throw FormatError(std::string("checkpoint vocabulary: ") + e.what());
  }

  auto& params = model->params().all();
  const std::uint64_t count = get_u64(in, "parameter count");
  if (count != params.size()) {
    throw FormatError("checkpoint holds " + std::to_string(count) + " parameters, model expects " +
                      std::to_string(params.size()));
  }
  for (auto& p : params) {
    const std::string name = get_string(in, "parameter name");
    if (name != p.name) throw FormatError("checkpoint parameter '" + name + "' where '" + p.name + "' was expected");
    const std::uint64_t rows = get_u64(in, "rows");
    const std::uint64_t cols = get_u64(in, "cols");
    if (rows != p.value.rows() || cols != p.value.cols()) {
      throw FormatError("checkpoint parameter '" + name + "' has shape " + std::to_string(rows) + "x" +
                        std::to_string(cols) + ", expected " + p.value.shape_string());
    }
    auto d = p.value.data();
    read_exact(in, d.data(), d.size() * sizeof(double), "parameter values");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("checkpoint has trailing bytes");
  return model;
}

std::unique_ptr<CaptionModel> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint '" + path.string() + "'");
  return read_checkpoint(in);
}

}  // namespace depthcap::cap
