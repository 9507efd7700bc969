#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace radarnet {

/// Precomputed twiddles and bit-reversal permutation for an in-place
/// iterative radix-2 transform. Sizes that are not a power of two fall back
/// to a direct O(N^2) evaluation.
class FftPlan {
 public:
  explicit FftPlan(std::size_t size);

  std::size_t size() const noexcept { return size_; }
  bool is_radix2() const noexcept { return radix2_; }

  /// Forward DFT, X[k] = sum_n x[n] exp(-2 pi i k n / N). `data.size()` must equal size().
  void forward(std::span<std::complex<double>> data) const;

 private:
  std::size_t size_;
  bool radix2_;
  std::vector<std::complex<double>> twiddles_;
  std::vector<std::size_t> bit_reverse_;
};

bool is_power_of_two(std::size_t n) noexcept;

/// Two-sided spectrum of a real window zero-padded to fft_size.
std::vector<std::complex<double>> real_spectrum(std::span<const float> window,
                                                std::size_t fft_size);

/// One-sided modulus |X[k]|, k = 0 .. fft_size/2, rectangular window.
/// Throws Error{WindowTooLong} if the window exceeds fft_size.
std::vector<double> fft_modulus(std::span<const float> window, std::size_t fft_size);

}  // namespace radarnet
