#pragma once

// Reference CPU kernels for the layer kinds. Tensors are channel-major,
// row-major within a channel; a batch is always a single sample.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "radarnet/network.hpp"

namespace radarnet::nn::kernels {

struct ConvGeometry {
  Shape in;
  Shape out;
  std::size_t kernel = 0;
  std::size_t stride = 1;
  std::size_t padding = 0;

  std::size_t patch() const noexcept { return in.channels * kernel * kernel; }
  std::size_t positions() const noexcept { return out.height * out.width; }
};

/// Unfolds input patches into a (C*K*K) x (OH*OW) matrix.
template <typename T>
void im2col(std::span<const T> in, const ConvGeometry& g, std::vector<T>& col);

/// Folds a patch-gradient matrix back onto the input, accumulating.
template <typename T>
void col2im(std::span<const T> col, const ConvGeometry& g, std::span<T> din);

template <typename T>
void conv_forward(std::span<const T> in, std::span<const T> weight, std::span<const T> bias,
                  const ConvGeometry& g, std::span<T> out, std::vector<T>& col);

/// Accumulates dW and db; writes din when it is non-empty.
template <typename T>
void conv_backward(std::span<const T> in, std::span<const T> dout, std::span<const T> weight,
                   const ConvGeometry& g, std::span<T> dweight, std::span<T> dbias,
                   std::span<T> din, std::vector<T>& col);

template <typename T>
void max_pool_forward(std::span<const T> in, Shape in_shape, Shape out_shape, std::size_t kernel,
                      std::size_t stride, std::span<T> out, std::vector<std::uint32_t>& argmax);

template <typename T>
void max_pool_backward(std::span<const T> dout, std::span<const std::uint32_t> argmax,
                       std::span<T> din);

template <typename T>
void lrn_forward(std::span<const T> in, Shape shape, const LayerSpec& spec, std::span<T> out,
                 std::vector<T>& scale);

template <typename T>
void lrn_backward(std::span<const T> in, std::span<const T> out, std::span<const T> dout,
                  std::span<const T> scale, Shape shape, const LayerSpec& spec, std::span<T> din);

template <typename T>
void fc_forward(std::span<const T> in, std::span<const T> weight, std::span<const T> bias,
                std::span<T> out);

template <typename T>
void fc_backward(std::span<const T> in, std::span<const T> dout, std::span<const T> weight,
                 std::span<T> dweight, std::span<T> dbias, std::span<T> din);

template <typename T>
void softmax(std::span<const T> logits, std::span<T> probs);

}  // namespace radarnet::nn::kernels
