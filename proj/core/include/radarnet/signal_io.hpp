#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "radarnet/radar_model.hpp"

namespace radarnet {

/// .rdb raw beat-signal layout (little endian): "RDB1", u32 samples_per_ramp,
/// u32 first_ramp (0 = up, 1 = down), u32 label (class index, 0xFFFFFFFF when
/// unlabeled), f64 sample_rate, u64 sample count, then float32 samples.
std::string encode_signal(const BeatSignal& sig);
BeatSignal decode_signal(std::string_view bytes);

void save_signal(const std::filesystem::path& path, const BeatSignal& sig);
BeatSignal load_signal(const std::filesystem::path& path);

}  // namespace radarnet
