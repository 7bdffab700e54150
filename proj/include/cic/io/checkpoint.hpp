#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "cic/nn/tensor_io.hpp"

namespace cic::io {

inline constexpr char kCheckpointMagic[4] = {'C', 'I', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout, all integers little-endian:
//   "CICK" | u32 version | u64 len + config echo (UTF-8)
//   | u64 array count | per array: u64 name len + name, u64 rank,
//     rank x u64 dims, f64 payload | u64 FNV-1a of all preceding bytes
struct Checkpoint {
  std::string config_echo;
  nn::ArrayMap arrays;
  bool operator==(const Checkpoint&) const = default;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
// Throws CorruptionError on a bad magic, version, layout or checksum.
Checkpoint parse_checkpoint(std::string_view bytes);

void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace cic::io
