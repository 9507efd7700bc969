#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>

#include "radarnet/spectrogram.hpp"

namespace radarnet {

/// Binary greyscale PGM ("P5", maxval 255) of a rows x cols matrix, min-max
/// scaled to 0..255. Row 0 (frequency bin 0) becomes the bottom image row.
/// With log_scale the values are mapped through 20*log10(|v| + 1e-12) first.
/// A constant matrix renders all-black.
std::string export_pgm(std::span<const double> values, std::size_t rows, std::size_t cols,
                       bool log_scale);
std::string export_pgm(const Spectrogram& s, bool log_scale);
std::string export_pgm(const RdTensor& t, std::size_t channel, bool log_scale);

void write_pgm(const std::filesystem::path& path, const std::string& pgm);

}  // namespace radarnet
