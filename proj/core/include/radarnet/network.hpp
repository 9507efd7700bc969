#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace radarnet::nn {

enum class LayerKind : std::uint8_t {
  Conv,
  MaxPool,
  ResponseNorm,
  FullyConnected,
  ReLU,
  Dropout,
  Softmax,
};

std::string_view to_string(LayerKind kind);

/// Declarative description of one layer. Only the fields relevant to `kind`
/// are read.
struct LayerSpec {
  LayerKind kind = LayerKind::ReLU;
  std::string name;
  std::size_t out_channels = 0;  // Conv
  std::size_t kernel = 0;        // Conv, MaxPool
  std::size_t stride = 1;        // Conv, MaxPool
  std::size_t padding = 0;       // Conv
  std::size_t units = 0;         // FullyConnected
  double dropout_rate = 0.5;     // Dropout
  // Across-channel response normalization:
  // y_c = x_c / (k + alpha * sum_{|c'-c| <= size/2} x_c'^2)^beta
  double lrn_k = 2.0;
  std::size_t lrn_size = 5;
  double lrn_alpha = 1e-4;
  double lrn_beta = 0.75;

  static LayerSpec conv(std::string name, std::size_t out_channels, std::size_t kernel,
                        std::size_t stride = 1, std::size_t padding = 0);
  static LayerSpec max_pool(std::string name, std::size_t kernel = 3, std::size_t stride = 2);
  static LayerSpec response_norm(std::string name);
  static LayerSpec fully_connected(std::string name, std::size_t units);
  static LayerSpec relu(std::string name);
  static LayerSpec dropout(std::string name, double rate = 0.5);
  static LayerSpec softmax(std::string name = "prob");
};

struct Shape {
  std::size_t channels = 0, height = 0, width = 0;
  std::size_t size() const noexcept { return channels * height * width; }
  bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& s);

enum class Preset : std::uint8_t { Full, Mini };
enum class Mode : std::uint8_t { Train, Eval };

Preset parse_preset(std::string_view name);
std::string_view to_string(Preset p);

inline constexpr std::size_t kDefaultClasses = 6;

/// Layer plan of a preset. Full: five conv layers (96, 256, 384, 384, 256
/// kernels) with max-pooling and response normalization after the first two,
/// then fc 4096 -> fc 4096 -> fc num_classes with dropout. Mini: the same
/// layer kinds scaled down for 3x257x32 inputs.
std::vector<LayerSpec> preset_layers(Preset preset, std::size_t num_classes = kDefaultClasses,
                                     double dropout_rate = 0.5);

template <typename T>
struct Parameter {
  std::string name;                  // "<layer>.weight" or "<layer>.bias"
  std::vector<std::uint32_t> dims;   // conv weight: out, in, k, k; fc weight: out, in
  std::vector<T> values;
};

/// Per-parameter gradient (or velocity) buffers aligned with Network::parameters().
template <typename T>
using ParamBuffers = std::vector<std::vector<T>>;

/// Activations and bookkeeping recorded by forward() and consumed by backward().
template <typename T>
struct ForwardCache {
  std::uint64_t network_uid = 0;
  std::uint64_t parameter_version = 0;
  Mode mode = Mode::Eval;
  std::vector<std::vector<T>> activations;        // [0] = input, [i+1] = output of layer i
  std::vector<std::vector<T>> aux;                // LRN scale, dropout mask
  std::vector<std::vector<std::uint32_t>> argmax;  // max-pool routing

  std::span<const T> probabilities() const { return activations.back(); }
  std::span<const T> logits() const { return activations[activations.size() - 2]; }
};

template <typename T>
class Network {
 public:
  using value_type = T;

  /// Validates the shape chain and initializes parameters deterministically
  /// from `seed`: zero-mean Gaussian weights with std sqrt(2 / fan_in)
  /// (sqrt(1 / fan_in) for the output layer), zero biases. Throws
  /// Error{LayerMismatch} naming the first inconsistent layer.
  static Network build(std::vector<LayerSpec> specs, Shape input, std::uint64_t seed);

  const std::vector<LayerSpec>& layers() const noexcept { return specs_; }
  /// shapes()[0] is the input shape, shapes()[i + 1] the output of layer i.
  const std::vector<Shape>& shapes() const noexcept { return shapes_; }
  Shape input_shape() const noexcept { return shapes_.front(); }
  std::size_t num_classes() const noexcept { return shapes_.back().size(); }

  const std::vector<Parameter<T>>& parameters() const noexcept { return params_; }
  /// Mutable access invalidates every outstanding ForwardCache.
  std::vector<Parameter<T>>& mutable_parameters() noexcept {
    ++version_;
    return params_;
  }
  std::size_t parameter_count() const noexcept;
  ParamBuffers<T> zero_buffers() const;

  std::uint64_t uid() const noexcept { return uid_; }
  std::uint64_t version() const noexcept { return version_; }

  /// Softmax class probabilities. In Train mode dropout draws its mask from
  /// `seed`; Eval mode is deterministic and ignores it.
  ForwardCache<T> forward(std::span<const T> input, Mode mode, std::uint64_t seed = 0) const;

  /// Gradients of the loss with respect to every parameter, given the
  /// gradient with respect to the pre-softmax logits.
  ParamBuffers<T> backward(const ForwardCache<T>& cache, std::span<const T> d_logits) const;

  /// Accumulating variant; `grads` must come from zero_buffers().
  void backward_into(const ForwardCache<T>& cache, std::span<const T> d_logits,
                     ParamBuffers<T>& grads) const;

  template <typename U>
  Network<U> convert() const;

 private:
  template <typename U>
  friend class Network;

  struct LayerParams {
    std::ptrdiff_t weight = -1;  // index into params_
    std::ptrdiff_t bias = -1;
  };

  std::vector<LayerSpec> specs_;
  std::vector<Shape> shapes_;
  std::vector<LayerParams> layer_params_;
  std::vector<Parameter<T>> params_;
  std::uint64_t uid_ = 0;
  std::uint64_t version_ = 0;
};

using NetworkF = Network<float>;
using NetworkD = Network<double>;

template <typename T>
Network<T> build_network(Preset preset, Shape input, std::size_t num_classes = kDefaultClasses,
                         std::uint64_t seed = 0, double dropout_rate = 0.5);

struct LossResult {
  double loss = 0.0;
  std::vector<double> d_logits;
};

/// Cross-entropy -ln p_true (p clamped to >= 1e-12) and its gradient with
/// respect to the logits, p - onehot(true_class).
LossResult loss_and_grad(std::span<const float> probabilities, std::size_t true_class);
LossResult loss_and_grad(std::span<const double> probabilities, std::size_t true_class);

struct Prediction {
  std::size_t class_index = 0;
  std::vector<double> scores;
};

/// Eval-mode forward; ties go to the lowest class index.
template <typename T>
Prediction predict(const Network<T>& net, std::span<const T> input);

std::size_t argmax_lowest(std::span<const double> scores);

}  // namespace radarnet::nn
