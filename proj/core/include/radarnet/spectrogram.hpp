#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "radarnet/radar_model.hpp"
#include "radarnet/vehicle_class.hpp"

namespace radarnet {

/// FFT-modulus matrix of one ramp polarity. Rows are frequency bins
/// (bin 0 = DC), columns are successive ramps of that polarity.
struct Spectrogram {
  std::size_t bins = 0;
  std::size_t columns = 0;
  std::vector<double> values;  // row-major, values[bin * columns + column]
  double bin_hz = 0.0;
  RampPolarity polarity = RampPolarity::Up;

  double at(std::size_t bin, std::size_t column) const { return values[bin * columns + column]; }
  double& at(std::size_t bin, std::size_t column) { return values[bin * columns + column]; }
};

struct RampWindows {
  std::vector<std::span<const float>> up;
  std::vector<std::span<const float>> down;
};

/// Splits a beat signal into non-overlapping ramp-long windows, alternately
/// assigned to the up and down lists starting at sig.first_ramp. A trailing
/// partial window is dropped. Views borrow from `sig`.
RampWindows segment_ramps(const BeatSignal& sig);

std::pair<Spectrogram, Spectrogram> build_spectrograms(const BeatSignal& sig,
                                                       const RadarParams& p);

/// Fixed-shape 3-channel range-Doppler tensor: up, down and their average.
/// Stored channel-major, row-major within each channel (row = frequency bin).
struct RdTensor {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> values;
  std::optional<VehicleClass> label;

  RdTensor() = default;
  RdTensor(std::size_t c, std::size_t h, std::size_t w)
      : channels(c), height(h), width(w), values(c * h * w, 0.0f) {}

  std::size_t size() const noexcept { return values.size(); }
  std::size_t channel_size() const noexcept { return height * width; }
  bool same_shape(const RdTensor& o) const noexcept {
    return channels == o.channels && height == o.height && width == o.width;
  }

  float at(std::size_t c, std::size_t h, std::size_t w) const {
    return values[(c * height + h) * width + w];
  }
  float& at(std::size_t c, std::size_t h, std::size_t w) {
    return values[(c * height + h) * width + w];
  }
  std::span<const float> channel(std::size_t c) const {
    return {values.data() + c * channel_size(), channel_size()};
  }
};

inline constexpr std::size_t kUpChannel = 0;
inline constexpr std::size_t kDownChannel = 1;
inline constexpr std::size_t kAverageChannel = 2;

struct TensorShapeOptions {
  std::size_t target_width = 32;
  /// 0 keeps every one-sided bin; a smaller value keeps the lowest bins,
  /// a larger one zero-pads above the highest bin.
  std::size_t target_height = 0;
  /// Without this flag a spectrogram wider than target_width is an error.
  bool crop_width = false;
};

/// Right-pads (in time) the two spectrograms with zero columns and stacks
/// them with their elementwise average.
RdTensor build_tensor(const Spectrogram& up, const Spectrogram& down,
                      const TensorShapeOptions& options);
RdTensor build_tensor(const Spectrogram& up, const Spectrogram& down, std::size_t target_width);

/// Full signal -> tensor pipeline (no mean normalization).
RdTensor signal_to_tensor(const BeatSignal& sig, const RadarParams& p,
                          const TensorShapeOptions& options);

RdTensor compute_mean_tensor(std::span<const RdTensor> train_tensors);
RdTensor compute_mean_tensor(std::span<const RdTensor* const> train_tensors);
RdTensor mean_normalize(const RdTensor& t, const RdTensor& mean);

}  // namespace radarnet
