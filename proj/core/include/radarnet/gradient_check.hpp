#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "radarnet/network.hpp"

namespace radarnet::nn {

struct GradientCheckOptions {
  double epsilon = 1e-4;
  std::size_t samples = 200;   // parameters probed, spread round-robin over the tensors
  std::uint64_t seed = 0;      // parameter selection
  Mode mode = Mode::Eval;      // Train replays one fixed dropout mask
  std::uint64_t dropout_seed = 0;
  /// Denominator floor: rel = |a - n| / max(|a|, |n|, scale_floor).
  double scale_floor = 1e-3;
};

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::size_t skipped_kinks = 0;  // probes redrawn because +-eps crossed a ReLU/pool switch
  std::string worst_parameter;  // "<name>[index]"
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compares backprop gradients of the cross-entropy loss, computed in T,
/// against central differences (L(w + eps) - L(w - eps)) / (2 eps) evaluated
/// in double precision. Probes that cross a ReLU or max-pool switch are
/// redrawn; `checked` falls short of `samples` only if redraws run out.
template <typename T>
GradientCheckResult gradient_check(const Network<T>& net, std::span<const T> input,
                                   std::size_t true_class,
                                   const GradientCheckOptions& options = {});

}  // namespace radarnet::nn
