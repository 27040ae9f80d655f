#pragma once

#include <filesystem>
#include <iosfwd>

#include "hvrp/nn/params.hpp"

namespace hvrp::nn {

inline constexpr char kCheckpointMagic[8] = {'H', 'V', 'R', 'P', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Layout: 8 magic bytes, u32 version, u64 header length, JSON header
/// (config, training metadata, tensor table), then each tensor's float64
/// values in table order. Integers and doubles are little-endian.
void save_checkpoint(const PolicyParams& params, std::ostream& out);
void save_checkpoint(const PolicyParams& params, const std::filesystem::path& path);

/// Throws CheckpointError on bad magic, unknown version, truncation or
/// shape inconsistencies.
PolicyParams load_checkpoint(std::istream& in);
PolicyParams load_checkpoint(const std::filesystem::path& path);

}  // namespace hvrp::nn
