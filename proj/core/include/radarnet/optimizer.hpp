#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "radarnet/network.hpp"

namespace radarnet::nn {

struct TrainConfig {
  double learning_rate = 0.0001;
  double momentum = 0.9;
  double weight_decay = 0.0005;
  std::size_t epochs = 15;
  std::uint64_t seed = 0;
  double dropout_rate = 0.5;

  /// Throws Error{Config} naming the offending field.
  void validate() const;
};

/// Classical momentum with L2 decay folded into the gradient:
///   v <- momentum * v - lr * (g + weight_decay * w);  w <- w + v
/// Throws Error{NonFiniteGradient} before touching anything if g has a
/// NaN or infinity.
template <typename T>
void sgd_update(std::span<T> weights, std::span<const T> grads, std::span<T> velocity,
                const TrainConfig& cfg);

/// Applies sgd_update to every parameter of `net`.
template <typename T>
void sgd_step(Network<T>& net, const ParamBuffers<T>& grads, ParamBuffers<T>& velocity,
              const TrainConfig& cfg);

}  // namespace radarnet::nn
