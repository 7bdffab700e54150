#include "cic/io/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cic/core/errors.hpp"
#include "cic/core/rng.hpp"

namespace cic::io {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::string_view take(std::uint64_t n, const char* what) {
    need(n, what);
    const auto out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::uint64_t n, const char* what) const {
    if (n > bytes_.size() - pos_) throw CorruptionError(std::string("checkpoint truncated while reading ") + what);
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  std::string out(kCheckpointMagic, 4);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, ckpt.config_echo.size());
  out += ckpt.config_echo;
  put<std::uint64_t>(out, ckpt.arrays.size());
  for (const auto& [name, t] : ckpt.arrays) {
    if (!t.valid()) throw InternalError("array '" + name + "' has inconsistent shape");
    put<std::uint64_t>(out, name.size());
    out += name;
    put<std::uint64_t>(out, t.shape.size());
    for (auto d : t.shape) put<std::uint64_t>(out, d);
    for (double x : t.data) put<double>(out, x);
  }
  put<std::uint64_t>(out, fnv1a64(out));
  return out;
}

Checkpoint parse_checkpoint(std::string_view bytes) {
  if (bytes.size() < 4 + 4 + 8 + 8 + 8) throw CorruptionError("checkpoint too short");
  if (std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) throw CorruptionError("not a checkpoint (bad magic)");
  const auto body = bytes.substr(0, bytes.size() - 8);
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body.size(), 8);
  if (stored != fnv1a64(body)) throw CorruptionError("checkpoint checksum mismatch");

  Reader r(body);
  r.take(4, "magic");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw CorruptionError("unsupported checkpoint version " + std::to_string(version) + " (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  Checkpoint out;
  const auto cfg_len = r.get<std::uint64_t>("config length");
  out.config_echo = std::string(r.take(cfg_len, "config echo"));
  const auto count = r.get<std::uint64_t>("array count");
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto name_len = r.get<std::uint64_t>("array name length");
    std::string name(r.take(name_len, "array name"));
    nn::TensorBuf t;
    const auto rank = r.get<std::uint64_t>("array rank");
    if (rank > 8) throw CorruptionError("array '" + name + "' has implausible rank");
    std::uint64_t numel = 1;
    for (std::uint64_t d = 0; d < rank; ++d) {
      t.shape.push_back(r.get<std::uint64_t>("array dims"));
      numel *= t.shape.back();
    }
    if (numel > r.remaining() / 8) throw CorruptionError("array '" + name + "' payload exceeds the file");
    t.data.resize(numel);
    for (auto& x : t.data) x = r.get<double>("array payload");
    if (!out.arrays.emplace(name, std::move(t)).second) throw CorruptionError("duplicate array '" + name + "'");
  }
  if (r.remaining() != 0) throw CorruptionError("trailing bytes after the last array");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view bytes) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) { write_file(path, serialize_checkpoint(ckpt)); }

Checkpoint read_checkpoint(const std::string& path) { return parse_checkpoint(read_file(path)); }

}  // namespace cic::io
