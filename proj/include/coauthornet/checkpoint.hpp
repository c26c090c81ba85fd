#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "coauthornet/linkpred.hpp"

namespace coauthornet {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::uint64_t split_seed = 0;
  std::map<std::string, std::string> config;  // written to the manifest only
};

// Little-endian binary container:
//   "CANCKPT\0", u32 version, u32 operator, u32 aggregator, u32 activation,
//   u32 normalize, u32 layers, u32 input dim, u32 dims[layers], u32 hidden,
//   u64 split seed, then per parameter block: u32 name length, name,
//   u64 count, count f64 values; finally a u64 FNV-1a checksum of all
//   preceding bytes. A text manifest (`<path>.manifest`) lists block shapes
//   and the config.
void save_checkpoint(const std::string& path, const LinkModelParams& params,
                     const CheckpointMeta& meta);

// Throws IoError if unreadable, FormatError naming the byte offset on any
// truncation, mismatch, or checksum failure.
LinkModelParams load_checkpoint(const std::string& path, CheckpointMeta* meta = nullptr);

}  // namespace coauthornet
