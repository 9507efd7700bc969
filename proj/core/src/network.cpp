#include "radarnet/network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "layers.hpp"
#include "radarnet/error.hpp"
#include "radarnet/seed.hpp"

namespace radarnet::nn {

namespace {

std::atomic<std::uint64_t> g_next_uid{1};

[[noreturn]] void layer_error(const LayerSpec& spec, const std::string& what) {
  throw Error(ErrorCode::LayerMismatch, "layer '" + spec.name + "': " + what);
}

kernels::ConvGeometry conv_geometry(const LayerSpec& spec, Shape in, Shape out) {
  return {in, out, spec.kernel, spec.stride, spec.padding};
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv: return "conv";
    case LayerKind::MaxPool: return "max_pool";
    case LayerKind::ResponseNorm: return "response_norm";
    case LayerKind::FullyConnected: return "fully_connected";
    case LayerKind::ReLU: return "relu";
    case LayerKind::Dropout: return "dropout";
    case LayerKind::Softmax: return "softmax";
  }
  return "unknown";
}

std::string to_string(const Shape& s) {
  std::ostringstream out;
  out << s.channels << "x" << s.height << "x" << s.width;
  return out.str();
}

LayerSpec LayerSpec::conv(std::string name, std::size_t out_channels, std::size_t kernel,
                          std::size_t stride, std::size_t padding) {
  LayerSpec s;
  s.kind = LayerKind::Conv;
  s.name = std::move(name);
  s.out_channels = out_channels;
  s.kernel = kernel;
  s.stride = stride;
  s.padding = padding;
  return s;
}

LayerSpec LayerSpec::max_pool(std::string name, std::size_t kernel, std::size_t stride) {
  LayerSpec s;
  s.kind = LayerKind::MaxPool;
  s.name = std::move(name);
  s.kernel = kernel;
  s.stride = stride;
  return s;
}

LayerSpec LayerSpec::response_norm(std::string name) {
  LayerSpec s;
  s.kind = LayerKind::ResponseNorm;
  s.name = std::move(name);
  return s;
}

LayerSpec LayerSpec::fully_connected(std::string name, std::size_t units) {
  LayerSpec s;
  s.kind = LayerKind::FullyConnected;
  s.name = std::move(name);
  s.units = units;
  return s;
}

LayerSpec LayerSpec::relu(std::string name) {
  LayerSpec s;
  s.kind = LayerKind::ReLU;
  s.name = std::move(name);
  return s;
}

LayerSpec LayerSpec::dropout(std::string name, double rate) {
  LayerSpec s;
  s.kind = LayerKind::Dropout;
  s.name = std::move(name);
  s.dropout_rate = rate;
  return s;
}

LayerSpec LayerSpec::softmax(std::string name) {
  LayerSpec s;
  s.kind = LayerKind::Softmax;
  s.name = std::move(name);
  return s;
}

Preset parse_preset(std::string_view name) {
  if (name == "full") return Preset::Full;
  if (name == "mini") return Preset::Mini;
  throw Error(ErrorCode::Config, "unknown network preset '" + std::string(name) + "'");
}

std::string_view to_string(Preset p) { return p == Preset::Full ? "full" : "mini"; }

std::vector<LayerSpec> preset_layers(Preset preset, std::size_t num_classes,
                                     double dropout_rate) {
  using L = LayerSpec;
  if (preset == Preset::Full) {
    return {
        L::conv("conv1", 96, 11, 4, 0),   L::relu("relu1"),
        L::max_pool("pool1"),             L::response_norm("norm1"),
        L::conv("conv2", 256, 5, 1, 2),   L::relu("relu2"),
        L::max_pool("pool2"),             L::response_norm("norm2"),
        L::conv("conv3", 384, 3, 1, 1),   L::relu("relu3"),
        L::conv("conv4", 384, 3, 1, 1),   L::relu("relu4"),
        L::conv("conv5", 256, 3, 1, 1),   L::relu("relu5"),
        L::max_pool("pool5"),
        L::fully_connected("fc6", 4096),  L::relu("relu6"),
        L::dropout("drop6", dropout_rate),
        L::fully_connected("fc7", 4096),  L::relu("relu7"),
        L::dropout("drop7", dropout_rate),
        L::fully_connected("fc8", num_classes),
        L::softmax("prob"),
    };
  }
  return {
      L::conv("conv1", 16, 5, 2, 2),   L::relu("relu1"),
      L::max_pool("pool1"),            L::response_norm("norm1"),
      L::conv("conv2", 32, 3, 1, 1),   L::relu("relu2"),
      L::max_pool("pool2"),            L::response_norm("norm2"),
      L::conv("conv3", 32, 3, 1, 1),   L::relu("relu3"),
      L::max_pool("pool3"),
      L::fully_connected("fc4", 128),  L::relu("relu4"),
      L::dropout("drop4", dropout_rate),
      L::fully_connected("fc5", num_classes),
      L::softmax("prob"),
  };
}

template <typename T>
Network<T> Network<T>::build(std::vector<LayerSpec> specs, Shape input, std::uint64_t seed) {
  if (specs.empty() || specs.back().kind != LayerKind::Softmax) {
    throw Error(ErrorCode::LayerMismatch, "network must end with a softmax layer");
  }
  if (input.size() == 0) throw Error(ErrorCode::LayerMismatch, "input shape is empty");

  Network net;
  net.uid_ = g_next_uid.fetch_add(1);
  net.shapes_.push_back(input);
  net.layer_params_.resize(specs.size());

  std::set<std::string> names;
  std::size_t last_param_layer = specs.size();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const LayerSpec& spec = specs[i];
    if (spec.name.empty()) layer_error(spec, "layer names must be non-empty");
    if (!names.insert(spec.name).second) layer_error(spec, "duplicate layer name");
    const Shape in = net.shapes_.back();
    Shape out = in;
    switch (spec.kind) {
      case LayerKind::Conv: {
        if (spec.out_channels == 0 || spec.kernel == 0 || spec.stride == 0) {
          layer_error(spec, "kernel count, size and stride must be positive");
        }
        const std::size_t ph = in.height + 2 * spec.padding;
        const std::size_t pw = in.width + 2 * spec.padding;
        if (spec.kernel > ph || spec.kernel > pw) {
          layer_error(spec, "kernel " + std::to_string(spec.kernel) + " exceeds padded input " +
                                std::to_string(ph) + "x" + std::to_string(pw));
        }
        out = {spec.out_channels, (ph - spec.kernel) / spec.stride + 1,
               (pw - spec.kernel) / spec.stride + 1};
        last_param_layer = i;
        break;
      }
      case LayerKind::MaxPool:
        if (spec.kernel == 0 || spec.stride == 0) layer_error(spec, "pool size must be positive");
        if (spec.kernel > in.height || spec.kernel > in.width) {
          layer_error(spec, "pool window exceeds input " + to_string(in));
        }
        out = {in.channels, (in.height - spec.kernel) / spec.stride + 1,
               (in.width - spec.kernel) / spec.stride + 1};
        break;
      case LayerKind::ResponseNorm:
        if (spec.lrn_size == 0) layer_error(spec, "normalization window must be positive");
        break;
      case LayerKind::FullyConnected:
        if (spec.units == 0) layer_error(spec, "unit count must be positive");
        out = {spec.units, 1, 1};
        last_param_layer = i;
        break;
      case LayerKind::Dropout:
        if (!(spec.dropout_rate >= 0.0 && spec.dropout_rate < 1.0)) {
          layer_error(spec, "dropout rate must lie in [0, 1)");
        }
        break;
      case LayerKind::Softmax:
        if (i + 1 != specs.size()) layer_error(spec, "softmax must be the last layer");
        break;
      case LayerKind::ReLU:
        break;
    }
    net.shapes_.push_back(out);
  }

  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const LayerSpec& spec = specs[i];
    const Shape in = net.shapes_[i];
    std::vector<std::uint32_t> wdims;
    std::size_t fan_in = 0;
    if (spec.kind == LayerKind::Conv) {
      wdims = {static_cast<std::uint32_t>(spec.out_channels),
               static_cast<std::uint32_t>(in.channels), static_cast<std::uint32_t>(spec.kernel),
               static_cast<std::uint32_t>(spec.kernel)};
      fan_in = in.channels * spec.kernel * spec.kernel;
    } else if (spec.kind == LayerKind::FullyConnected) {
      wdims = {static_cast<std::uint32_t>(spec.units), static_cast<std::uint32_t>(in.size())};
      fan_in = in.size();
    } else {
      continue;
    }
    const std::size_t out_units = wdims.front();
    const double gain = i == last_param_layer ? 1.0 : 2.0;
    std::normal_distribution<double> init(0.0, std::sqrt(gain / static_cast<double>(fan_in)));
    Parameter<T> w{spec.name + ".weight", wdims, std::vector<T>(out_units * fan_in)};
    for (auto& v : w.values) v = static_cast<T>(init(rng));
    Parameter<T> b{spec.name + ".bias", {static_cast<std::uint32_t>(out_units)},
                   std::vector<T>(out_units, T(0))};
    net.layer_params_[i].weight = static_cast<std::ptrdiff_t>(net.params_.size());
    net.params_.push_back(std::move(w));
    net.layer_params_[i].bias = static_cast<std::ptrdiff_t>(net.params_.size());
    net.params_.push_back(std::move(b));
  }
  net.specs_ = std::move(specs);
  return net;
}

template <typename T>
std::size_t Network<T>::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.values.size();
  return n;
}

template <typename T>
ParamBuffers<T> Network<T>::zero_buffers() const {
  ParamBuffers<T> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.emplace_back(p.values.size(), T(0));
  return out;
}

template <typename T>
ForwardCache<T> Network<T>::forward(std::span<const T> input, Mode mode,
                                    std::uint64_t seed) const {
  if (input.size() != shapes_.front().size()) {
    throw Error(ErrorCode::ShapeMismatch, "input has " + std::to_string(input.size()) +
                                              " values, network expects " +
                                              to_string(shapes_.front()));
  }
  ForwardCache<T> cache;
  cache.network_uid = uid_;
  cache.parameter_version = version_;
  cache.mode = mode;
  cache.activations.resize(specs_.size() + 1);
  cache.aux.resize(specs_.size());
  cache.argmax.resize(specs_.size());
  cache.activations[0].assign(input.begin(), input.end());

  std::vector<T> col;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const LayerSpec& spec = specs_[i];
    const std::vector<T>& in = cache.activations[i];
    std::vector<T>& out = cache.activations[i + 1];
    out.assign(shapes_[i + 1].size(), T(0));
    switch (spec.kind) {
      case LayerKind::Conv:
        kernels::conv_forward<T>(in, params_[layer_params_[i].weight].values,
                                 params_[layer_params_[i].bias].values,
                                 conv_geometry(spec, shapes_[i], shapes_[i + 1]), out, col);
        break;
      case LayerKind::MaxPool:
        kernels::max_pool_forward<T>(in, shapes_[i], shapes_[i + 1], spec.kernel, spec.stride,
                                     out, cache.argmax[i]);
        break;
      case LayerKind::ResponseNorm:
        kernels::lrn_forward<T>(in, shapes_[i], spec, out, cache.aux[i]);
        break;
      case LayerKind::FullyConnected:
        kernels::fc_forward<T>(in, params_[layer_params_[i].weight].values,
                               params_[layer_params_[i].bias].values, out);
        break;
      case LayerKind::ReLU:
        for (std::size_t j = 0; j < in.size(); ++j) out[j] = in[j] > T(0) ? in[j] : T(0);
        break;
      case LayerKind::Dropout:
        if (mode == Mode::Eval || spec.dropout_rate == 0.0) {
          out = in;
        } else {
          std::mt19937_64 rng(mix_seed({seed, i}));
          std::bernoulli_distribution keep(1.0 - spec.dropout_rate);
          const T scale = static_cast<T>(1.0 / (1.0 - spec.dropout_rate));
          std::vector<T>& mask = cache.aux[i];
          mask.resize(in.size());
          for (std::size_t j = 0; j < in.size(); ++j) {
            mask[j] = keep(rng) ? scale : T(0);
            out[j] = in[j] * mask[j];
          }
        }
        break;
      case LayerKind::Softmax:
        kernels::softmax<T>(in, out);
        break;
    }
  }
  return cache;
}

template <typename T>
void Network<T>::backward_into(const ForwardCache<T>& cache, std::span<const T> d_logits,
                               ParamBuffers<T>& grads) const {
  if (cache.network_uid != uid_ || cache.parameter_version != version_ ||
      cache.activations.size() != specs_.size() + 1) {
    throw Error(ErrorCode::StaleCache,
                "forward cache does not belong to the current network parameters");
  }
  if (d_logits.size() != num_classes()) {
    throw Error(ErrorCode::ShapeMismatch, "logit gradient has the wrong length");
  }
  if (grads.size() != params_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "gradient buffers do not match the parameters");
  }

  std::vector<T> dout(d_logits.begin(), d_logits.end());
  std::vector<T> din;
  std::vector<T> col;
  // The softmax layer is folded into d_logits; walk back from the layer below it.
  for (std::size_t i = specs_.size() - 1; i-- > 0;) {
    const LayerSpec& spec = specs_[i];
    const std::vector<T>& in = cache.activations[i];
    const bool need_input_grad = i > 0;
    din.assign(need_input_grad ? in.size() : 0, T(0));
    switch (spec.kind) {
      case LayerKind::Conv: {
        const auto& lp = layer_params_[i];
        kernels::conv_backward<T>(in, dout, params_[lp.weight].values,
                                  conv_geometry(spec, shapes_[i], shapes_[i + 1]),
                                  grads[lp.weight], grads[lp.bias], din, col);
        break;
      }
      case LayerKind::MaxPool:
        if (need_input_grad) kernels::max_pool_backward<T>(dout, cache.argmax[i], din);
        break;
      case LayerKind::ResponseNorm:
        if (need_input_grad) {
          kernels::lrn_backward<T>(in, cache.activations[i + 1], dout, cache.aux[i], shapes_[i],
                                   spec, din);
        }
        break;
      case LayerKind::FullyConnected: {
        const auto& lp = layer_params_[i];
        kernels::fc_backward<T>(in, dout, params_[lp.weight].values, grads[lp.weight],
                                grads[lp.bias], din);
        break;
      }
      case LayerKind::ReLU:
        if (need_input_grad) {
          for (std::size_t j = 0; j < in.size(); ++j) din[j] = in[j] > T(0) ? dout[j] : T(0);
        }
        break;
      case LayerKind::Dropout:
        if (need_input_grad) {
          if (cache.mode == Mode::Eval || spec.dropout_rate == 0.0) {
            din = dout;
          } else {
            const auto& mask = cache.aux[i];
            for (std::size_t j = 0; j < in.size(); ++j) din[j] = dout[j] * mask[j];
          }
        }
        break;
      case LayerKind::Softmax:
        throw Error(ErrorCode::LayerMismatch, "softmax may only appear as the last layer");
    }
    dout.swap(din);
  }
}

template <typename T>
ParamBuffers<T> Network<T>::backward(const ForwardCache<T>& cache,
                                     std::span<const T> d_logits) const {
  ParamBuffers<T> grads = zero_buffers();
  backward_into(cache, d_logits, grads);
  return grads;
}

template <typename T>
template <typename U>
Network<U> Network<T>::convert() const {
  Network<U> out;
  out.specs_ = specs_;
  out.shapes_ = shapes_;
  out.uid_ = g_next_uid.fetch_add(1);
  out.layer_params_.resize(layer_params_.size());
  for (std::size_t i = 0; i < layer_params_.size(); ++i) {
    out.layer_params_[i].weight = layer_params_[i].weight;
    out.layer_params_[i].bias = layer_params_[i].bias;
  }
  for (const auto& p : params_) {
    Parameter<U> q{p.name, p.dims, std::vector<U>(p.values.size())};
    std::transform(p.values.begin(), p.values.end(), q.values.begin(),
                   [](T v) { return static_cast<U>(v); });
    out.params_.push_back(std::move(q));
  }
  return out;
}

template <typename T>
Network<T> build_network(Preset preset, Shape input, std::size_t num_classes, std::uint64_t seed,
                         double dropout_rate) {
  if (input.channels != 3) {
    throw Error(ErrorCode::LayerMismatch, "network input must have 3 channels, got " +
                                              to_string(input));
  }
  if (preset == Preset::Full && (input.height != 227 || input.width != 227)) {
    throw Error(ErrorCode::LayerMismatch, "full preset expects a 3x227x227 input, got " +
                                              to_string(input));
  }
  auto net = Network<T>::build(preset_layers(preset, num_classes, dropout_rate), input, seed);
  if (net.num_classes() != num_classes) {
    throw Error(ErrorCode::LayerMismatch, "output width does not match the class count");
  }
  return net;
}

namespace {

template <typename T>
LossResult loss_and_grad_impl(std::span<const T> probabilities, std::size_t true_class) {
  if (true_class >= probabilities.size()) {
    throw Error(ErrorCode::InvalidArgument, "true class index out of range");
  }
  LossResult r;
  r.loss = -std::log(std::max(static_cast<double>(probabilities[true_class]), 1e-12));
  r.d_logits.assign(probabilities.begin(), probabilities.end());
  r.d_logits[true_class] -= 1.0;
  return r;
}

}  // namespace

LossResult loss_and_grad(std::span<const float> probabilities, std::size_t true_class) {
  return loss_and_grad_impl(probabilities, true_class);
}

LossResult loss_and_grad(std::span<const double> probabilities, std::size_t true_class) {
  return loss_and_grad_impl(probabilities, true_class);
}

std::size_t argmax_lowest(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

template <typename T>
Prediction predict(const Network<T>& net, std::span<const T> input) {
  const auto cache = net.forward(input, Mode::Eval);
  Prediction p;
  const auto probs = cache.probabilities();
  p.scores.assign(probs.begin(), probs.end());
  p.class_index = argmax_lowest(p.scores);
  return p;
}

template class Network<float>;
template class Network<double>;
template Network<double> Network<float>::convert<double>() const;
template Network<float> Network<double>::convert<float>() const;
template Network<float> Network<float>::convert<float>() const;
template Network<double> Network<double>::convert<double>() const;
template Network<float> build_network<float>(Preset, Shape, std::size_t, std::uint64_t, double);
template Network<double> build_network<double>(Preset, Shape, std::size_t, std::uint64_t, double);
template Prediction predict<float>(const Network<float>&, std::span<const float>);
template Prediction predict<double>(const Network<double>&, std::span<const double>);

}  // namespace radarnet::nn
