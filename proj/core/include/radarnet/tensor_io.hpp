#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "radarnet/spectrogram.hpp"

namespace radarnet {

/// .rdt layout: "RDT1", u32 channels, u32 height, u32 width (little endian),
/// then channels*height*width little-endian float32 values in storage order.
std::string encode_tensor(const RdTensor& t);

/// Throws BadMagic, Truncated or DimensionOverflow. The label is not stored.
RdTensor decode_tensor(std::string_view bytes);

void save_tensor(const std::filesystem::path& path, const RdTensor& t);
RdTensor load_tensor(const std::filesystem::path& path);

}  // namespace radarnet
