#include "radarnet/fft.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include "radarnet/error.hpp"
#include "radarnet/radar_model.hpp"

namespace radarnet {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

FftPlan::FftPlan(std::size_t size) : size_(size), radix2_(is_power_of_two(size)) {
  if (size == 0) throw Error(ErrorCode::InvalidArgument, "FFT size must be positive");
  twiddles_.resize(radix2_ ? size / 2 : size);
  for (std::size_t k = 0; k < twiddles_.size(); ++k) {
    const double angle = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(size);
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
  if (!radix2_) return;
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < size) ++bits;
  bit_reverse_.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
    bit_reverse_[i] = r;
  }
}

void FftPlan::forward(std::span<std::complex<double>> data) const {
  if (data.size() != size_) {
    throw Error(ErrorCode::ShapeMismatch, "FFT input length does not match the plan");
  }
  if (!radix2_) {
    std::vector<std::complex<double>> out(size_);
    for (std::size_t k = 0; k < size_; ++k) {
      std::complex<double> acc{};
      for (std::size_t n = 0; n < size_; ++n) acc += data[n] * twiddles_[(k * n) % size_];
      out[k] = acc;
    }
    std::copy(out.begin(), out.end(), data.begin());
    return;
  }
  for (std::size_t i = 0; i < size_; ++i) {
    const std::size_t j = bit_reverse_[i];
    if (i < j) std::swap(data[i], data[j]);
  }
  for (std::size_t len = 2; len <= size_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = size_ / len;
    for (std::size_t start = 0; start < size_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const std::complex<double> t = twiddles_[k * stride] * data[start + k + half];
        const std::complex<double> u = data[start + k];
        data[start + k] = u + t;
        data[start + k + half] = u - t;
      }
    }
  }
}

namespace {

const FftPlan& cached_plan(std::size_t size) {
  thread_local std::map<std::size_t, std::unique_ptr<FftPlan>> plans;
  auto& slot = plans[size];
  if (!slot) slot = std::make_unique<FftPlan>(size);
  return *slot;
}

}  // namespace

std::vector<std::complex<double>> real_spectrum(std::span<const float> window,
                                                std::size_t fft_size) {
  if (window.size() > fft_size) {
    throw Error(ErrorCode::WindowTooLong, "window of " + std::to_string(window.size()) +
                                              " samples exceeds FFT size " +
                                              std::to_string(fft_size));
  }
  std::vector<std::complex<double>> buf(fft_size);
  for (std::size_t i = 0; i < window.size(); ++i) buf[i] = static_cast<double>(window[i]);
  cached_plan(fft_size).forward(buf);
  return buf;
}

std::vector<double> fft_modulus(std::span<const float> window, std::size_t fft_size) {
  const auto spectrum = real_spectrum(window, fft_size);
  std::vector<double> column(fft_size / 2 + 1);
  for (std::size_t k = 0; k < column.size(); ++k) column[k] = std::abs(spectrum[k]);
  return column;
}

}  // namespace radarnet
