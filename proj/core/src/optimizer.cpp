#include "radarnet/optimizer.hpp"

#include <cmath>
#include <string>

#include "radarnet/error.hpp"

namespace radarnet::nn {

void TrainConfig::validate() const {
  auto fail = [](const char* field, const char* rule) {
    throw Error(ErrorCode::Config, std::string("train.") + field + " must be " + rule);
  };
  if (!(learning_rate > 0.0)) fail("learning_rate", "> 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) fail("momentum", "in [0, 1)");
  if (!(weight_decay >= 0.0)) fail("weight_decay", ">= 0");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) fail("dropout_rate", "in [0, 1)");
}

namespace {

template <typename T>
void require_finite(std::span<const T> grads, const std::string& what) {
  for (T g : grads) {
    if (!std::isfinite(g)) {
      throw Error(ErrorCode::NonFiniteGradient, "non-finite gradient in " + what);
    }
  }
}

template <typename T>
void apply_update(std::span<T> w, std::span<const T> g, std::span<T> v, const TrainConfig& cfg) {
  const T mu = static_cast<T>(cfg.momentum);
  const T lr = static_cast<T>(cfg.learning_rate);
  const T wd = static_cast<T>(cfg.weight_decay);
  for (std::size_t i = 0; i < w.size(); ++i) {
    v[i] = mu * v[i] - lr * (g[i] + wd * w[i]);
    w[i] += v[i];
  }
}

}  // namespace

template <typename T>
void sgd_update(std::span<T> weights, std::span<const T> grads, std::span<T> velocity,
                const TrainConfig& cfg) {
  if (weights.size() != grads.size() || weights.size() != velocity.size()) {
    throw Error(ErrorCode::ShapeMismatch, "weights, gradients and velocity differ in size");
  }
  require_finite(grads, "parameter block");
  apply_update(weights, grads, velocity, cfg);
}

template <typename T>
void sgd_step(Network<T>& net, const ParamBuffers<T>& grads, ParamBuffers<T>& velocity,
              const TrainConfig& cfg) {
  const auto& params = net.parameters();
  if (grads.size() != params.size() || velocity.size() != params.size()) {
    throw Error(ErrorCode::ShapeMismatch, "gradient buffers do not match the network");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].size() != params[i].values.size() ||
        velocity[i].size() != params[i].values.size()) {
      throw Error(ErrorCode::ShapeMismatch, "gradient buffer size mismatch for " + params[i].name);
    }
    require_finite<T>(grads[i], params[i].name);
  }
  auto& mutable_params = net.mutable_parameters();
  for (std::size_t i = 0; i < mutable_params.size(); ++i) {
    apply_update<T>(mutable_params[i].values, grads[i], velocity[i], cfg);
  }
}

template void sgd_update<float>(std::span<float>, std::span<const float>, std::span<float>,
                                const TrainConfig&);
template void sgd_update<double>(std::span<double>, std::span<const double>, std::span<double>,
                                 const TrainConfig&);
template void sgd_step<float>(Network<float>&, const ParamBuffers<float>&, ParamBuffers<float>&,
                              const TrainConfig&);
template void sgd_step<double>(Network<double>&, const ParamBuffers<double>&,
                               ParamBuffers<double>&, const TrainConfig&);

}  // namespace radarnet::nn
