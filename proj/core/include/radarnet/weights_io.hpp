#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "radarnet/network.hpp"

namespace radarnet::nn {

/// One named parameter array as stored in a .rdw file.
struct WeightRecord {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> values;
};

/// .rdw layout (little endian): "RDW1", u32 record count, then per record
/// u32 name length, UTF-8 name, u32 rank, rank x u32 dims, float32 values.
std::string encode_weights(std::span<const WeightRecord> records);
std::vector<WeightRecord> decode_weights(std::string_view bytes);

template <typename T>
std::vector<WeightRecord> weight_records(const Network<T>& net);

struct LoadOptions {
  /// Leave fully connected layers at their current (random) values, as when
  /// importing convolutional features trained elsewhere.
  bool reinit_fc = false;
  /// Keep parameters that have no record in the file instead of failing.
  bool allow_missing = false;
};

struct LoadReport {
  std::vector<std::string> loaded;
  std::vector<std::string> kept;     // left at their initial values
  std::vector<std::string> ignored;  // records with no matching parameter
};

/// Copies matching records into `net`. Records whose shape disagrees with
/// a parameter that must be loaded raise Error{LayerMismatch} listing every
/// offending layer; nothing is modified in that case.
template <typename T>
LoadReport apply_weights(Network<T>& net, std::span<const WeightRecord> records,
                         const LoadOptions& options = {});

template <typename T>
void save_weights(const std::filesystem::path& path, const Network<T>& net);

template <typename T>
LoadReport load_weights(const std::filesystem::path& path, Network<T>& net,
                        const LoadOptions& options = {});

}  // namespace radarnet::nn
