#include "radarnet/spectrogram.hpp"

#include <algorithm>
#include <string>

#include "radarnet/error.hpp"
#include "radarnet/fft.hpp"

namespace radarnet {

RampWindows segment_ramps(const BeatSignal& sig) {
  if (sig.samples_per_ramp == 0) {
    throw Error(ErrorCode::InvalidArgument, "samples_per_ramp must be positive");
  }
  const std::size_t windows = sig.samples.size() / sig.samples_per_ramp;
  if (windows < 2) {
    throw Error(ErrorCode::TooFewRamps,
                "signal of " + std::to_string(sig.samples.size()) +
                    " samples holds fewer than one up/down ramp pair");
  }
  RampWindows out;
  out.up.reserve(windows / 2 + 1);
  out.down.reserve(windows / 2 + 1);
  for (std::size_t w = 0; w < windows; ++w) {
    std::span<const float> window(sig.samples.data() + w * sig.samples_per_ramp,
                                  sig.samples_per_ramp);
    const bool first = (w % 2 == 0);
    const RampPolarity polarity = first ? sig.first_ramp : opposite(sig.first_ramp);
    (polarity == RampPolarity::Up ? out.up : out.down).push_back(window);
  }
  return out;
}

namespace {

Spectrogram spectrogram_of(const std::vector<std::span<const float>>& windows,
                           std::size_t fft_size, double bin_hz, RampPolarity polarity) {
  Spectrogram s;
  s.bins = fft_size / 2 + 1;
  s.columns = windows.size();
  s.bin_hz = bin_hz;
  s.polarity = polarity;
  s.values.assign(s.bins * s.columns, 0.0);
  for (std::size_t c = 0; c < windows.size(); ++c) {
    const auto column = fft_modulus(windows[c], fft_size);
    for (std::size_t b = 0; b < s.bins; ++b) s.at(b, c) = column[b];
  }
  return s;
}

}  // namespace

std::pair<Spectrogram, Spectrogram> build_spectrograms(const BeatSignal& sig,
                                                       const RadarParams& p) {
  const RampWindows windows = segment_ramps(sig);
  const double bin_hz = sig.sample_rate / static_cast<double>(p.fft_size);
  return {spectrogram_of(windows.up, p.fft_size, bin_hz, RampPolarity::Up),
          spectrogram_of(windows.down, p.fft_size, bin_hz, RampPolarity::Down)};
}

RdTensor build_tensor(const Spectrogram& up, const Spectrogram& down,
                      const TensorShapeOptions& options) {
  if (up.bins != down.bins) {
    throw Error(ErrorCode::ShapeMismatch, "up and down spectrograms have different bin counts");
  }
  const std::size_t wide = std::max(up.columns, down.columns);
  const std::size_t narrow = std::min(up.columns, down.columns);
  if (wide - narrow > 1) {
    throw Error(ErrorCode::ShapeMismatch,
                "up and down spectrogram widths differ by more than one column");
  }
  if (wide > options.target_width && !options.crop_width) {
    throw Error(ErrorCode::PadOverflow, "spectrogram width " + std::to_string(wide) +
                                            " exceeds target width " +
                                            std::to_string(options.target_width));
  }
  const std::size_t height = options.target_height == 0 ? up.bins : options.target_height;
  RdTensor t(3, height, options.target_width);
  const std::size_t rows = std::min(height, up.bins);
  auto copy_channel = [&](const Spectrogram& s, std::size_t channel) {
    const std::size_t cols = std::min(s.columns, options.target_width);
    for (std::size_t b = 0; b < rows; ++b) {
      for (std::size_t c = 0; c < cols; ++c) t.at(channel, b, c) = static_cast<float>(s.at(b, c));
    }
  };
  copy_channel(up, kUpChannel);
  copy_channel(down, kDownChannel);
  for (std::size_t i = 0; i < t.channel_size(); ++i) {
    const float a = t.values[kUpChannel * t.channel_size() + i];
    const float b = t.values[kDownChannel * t.channel_size() + i];
    t.values[kAverageChannel * t.channel_size() + i] = 0.5f * (a + b);
  }
  return t;
}

RdTensor build_tensor(const Spectrogram& up, const Spectrogram& down, std::size_t target_width) {
  TensorShapeOptions options;
  options.target_width = target_width;
  return build_tensor(up, down, options);
}

RdTensor signal_to_tensor(const BeatSignal& sig, const RadarParams& p,
                          const TensorShapeOptions& options) {
  const auto [up, down] = build_spectrograms(sig, p);
  RdTensor t = build_tensor(up, down, options);
  t.label = sig.label;
  return t;
}

RdTensor compute_mean_tensor(std::span<const RdTensor* const> train_tensors) {
  if (train_tensors.empty()) {
    throw Error(ErrorCode::EmptyInput, "cannot average an empty tensor list");
  }
  const RdTensor& first = *train_tensors.front();
  std::vector<double> sum(first.size(), 0.0);
  for (const RdTensor* t : train_tensors) {
    if (!t->same_shape(first)) {
      throw Error(ErrorCode::ShapeMismatch, "tensors in the training set differ in shape");
    }
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += t->values[i];
  }
  RdTensor mean(first.channels, first.height, first.width);
  const double n = static_cast<double>(train_tensors.size());
  for (std::size_t i = 0; i < sum.size(); ++i) mean.values[i] = static_cast<float>(sum[i] / n);
  return mean;
}

RdTensor compute_mean_tensor(std::span<const RdTensor> train_tensors) {
  std::vector<const RdTensor*> ptrs;
  ptrs.reserve(train_tensors.size());
  for (const auto& t : train_tensors) ptrs.push_back(&t);
  return compute_mean_tensor(std::span<const RdTensor* const>(ptrs));
}

RdTensor mean_normalize(const RdTensor& t, const RdTensor& mean) {
  if (!t.same_shape(mean)) {
    throw Error(ErrorCode::ShapeMismatch, "tensor and mean tensor differ in shape");
  }
  RdTensor out = t;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= mean.values[i];
  return out;
}

}  // namespace radarnet
