#include "radarnet/gradient_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace radarnet::nn {

namespace {

// Which side of every ReLU and max-pool switch the activations sit on.
template <typename T>
std::vector<std::uint32_t> kink_signature(const Network<T>& net, const ForwardCache<T>& cache) {
  std::vector<std::uint32_t> sig;
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    switch (net.layers()[i].kind) {
      case LayerKind::ReLU:
        for (T v : cache.activations[i]) sig.push_back(v > T(0) ? 1u : 0u);
        break;
      case LayerKind::MaxPool:
        sig.insert(sig.end(), cache.argmax[i].begin(), cache.argmax[i].end());
        break;
      default:
        break;
    }
  }
  return sig;
}

struct Probe {
  double loss = 0.0;
  std::vector<std::uint32_t> signature;
};

Probe probe_at(const Network<double>& net, std::span<const double> input, std::size_t true_class,
               const GradientCheckOptions& o) {
  const auto cache = net.forward(input, o.mode, o.dropout_seed);
  return {loss_and_grad(cache.probabilities(), true_class).loss, kink_signature(net, cache)};
}

}  // namespace

template <typename T>
GradientCheckResult gradient_check(const Network<T>& net, std::span<const T> input,
                                   std::size_t true_class, const GradientCheckOptions& o) {
  // Analytic gradients come from backprop in T. The finite-difference
  // reference always runs on a double copy of the same weights: in float the
  // rounding of the loss alone exceeds the difference quotient's resolution.
  const auto cache = net.forward(input, o.mode, o.dropout_seed);
  const auto lg = loss_and_grad(cache.probabilities(), true_class);
  const std::vector<T> d_logits(lg.d_logits.begin(), lg.d_logits.end());
  const auto grads = net.backward(cache, d_logits);

  Network<double> probe = net.template convert<double>();
  const std::vector<double> x(input.begin(), input.end());
  const std::span<const double> xs(x);
  const auto base_signature =
      kink_signature(probe, probe.forward(xs, o.mode, o.dropout_seed));

  GradientCheckResult result;
  std::mt19937_64 rng(o.seed);
  const std::size_t tensors = probe.parameters().size();
  // A probe whose +-eps step flips a ReLU or max-pool switch straddles a
  // kink where central differences are meaningless; it is redrawn.
  const std::size_t max_attempts = 20 * o.samples + 100;
  for (std::size_t s = 0, attempts = 0; s < o.samples && attempts < max_attempts; ++attempts) {
    const std::size_t p = s % tensors;
    const std::size_t n = probe.parameters()[p].values.size();
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);

    const double original = probe.parameters()[p].values[j];
    probe.mutable_parameters()[p].values[j] = original + o.epsilon;
    const auto plus_probe = probe_at(probe, xs, true_class, o);
    probe.mutable_parameters()[p].values[j] = original - o.epsilon;
    const auto minus_probe = probe_at(probe, xs, true_class, o);
    probe.mutable_parameters()[p].values[j] = original;
    if (plus_probe.signature != base_signature || minus_probe.signature != base_signature) {
      ++result.skipped_kinks;
      continue;
    }
    ++s;

    // The representable step, so rounding of w +- eps cancels.
    const double step = (original + o.epsilon) - (original - o.epsilon);
    const double numeric = (plus_probe.loss - minus_probe.loss) / step;
    const double analytic = static_cast<double>(grads[p][j]);
    const double scale = std::max({std::abs(analytic), std::abs(numeric), o.scale_floor});
    const double rel = std::abs(analytic - numeric) / scale;
    ++result.checked;
    if (rel >= result.max_relative_error) {
      result.max_relative_error = rel;
      result.worst_parameter = probe.parameters()[p].name + "[" + std::to_string(j) + "]";
      result.worst_analytic = analytic;
      result.worst_numeric = numeric;
    }
  }
  return result;
}

template GradientCheckResult gradient_check<float>(const Network<float>&, std::span<const float>,
                                                   std::size_t, const GradientCheckOptions&);
template GradientCheckResult gradient_check<double>(const Network<double>&,
                                                    std::span<const double>, std::size_t,
                                                    const GradientCheckOptions&);

}  // namespace radarnet::nn
