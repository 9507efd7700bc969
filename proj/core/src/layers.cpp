#include "layers.hpp"

#include <algorithm>
#include <limits>

namespace radarnet::nn::kernels {

template <typename T>
void im2col(std::span<const T> in, const ConvGeometry& g, std::vector<T>& col) {
  const std::size_t k = g.kernel;
  const std::size_t P = g.positions();
  col.assign(g.patch() * P, T(0));
  const auto H = static_cast<std::ptrdiff_t>(g.in.height);
  const auto W = static_cast<std::ptrdiff_t>(g.in.width);
  const auto pad = static_cast<std::ptrdiff_t>(g.padding);
  for (std::size_t c = 0; c < g.in.channels; ++c) {
    const T* plane = in.data() + c * g.in.height * g.in.width;
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        T* row = col.data() + ((c * k + ky) * k + kx) * P;
        for (std::size_t oy = 0; oy < g.out.height; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - pad;
          if (iy < 0 || iy >= H) continue;
          for (std::size_t ox = 0; ox < g.out.width; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - pad;
            if (ix < 0 || ix >= W) continue;
            row[oy * g.out.width + ox] = plane[iy * W + ix];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im(std::span<const T> col, const ConvGeometry& g, std::span<T> din) {
  const std::size_t k = g.kernel;
  const std::size_t P = g.positions();
  const auto H = static_cast<std::ptrdiff_t>(g.in.height);
  const auto W = static_cast<std::ptrdiff_t>(g.in.width);
  const auto pad = static_cast<std::ptrdiff_t>(g.padding);
  for (std::size_t c = 0; c < g.in.channels; ++c) {
    T* plane = din.data() + c * g.in.height * g.in.width;
    for (std::size_t ky = 0; ky < k; ++ky) {
      for (std::size_t kx = 0; kx < k; ++kx) {
        const T* row = col.data() + ((c * k + ky) * k + kx) * P;
        for (std::size_t oy = 0; oy < g.out.height; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * g.stride + ky) - pad;
          if (iy < 0 || iy >= H) continue;
          for (std::size_t ox = 0; ox < g.out.width; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * g.stride + kx) - pad;
            if (ix < 0 || ix >= W) continue;
            plane[iy * W + ix] += row[oy * g.out.width + ox];
          }
        }
      }
    }
  }
}

template <typename T>
void conv_forward(std::span<const T> in, std::span<const T> weight, std::span<const T> bias,
                  const ConvGeometry& g, std::span<T> out, std::vector<T>& col) {
  im2col(in, g, col);
  const std::size_t K = g.patch();
  const std::size_t P = g.positions();
  for (std::size_t oc = 0; oc < g.out.channels; ++oc) {
    T* o = out.data() + oc * P;
    std::fill(o, o + P, bias[oc]);
    const T* w = weight.data() + oc * K;
    for (std::size_t kk = 0; kk < K; ++kk) {
      const T wk = w[kk];
      if (wk == T(0)) continue;
      const T* c = col.data() + kk * P;
      for (std::size_t p = 0; p < P; ++p) o[p] += wk * c[p];
    }
  }
}

template <typename T>
void conv_backward(std::span<const T> in, std::span<const T> dout, std::span<const T> weight,
                   const ConvGeometry& g, std::span<T> dweight, std::span<T> dbias,
                   std::span<T> din, std::vector<T>& col) {
  im2col(in, g, col);
  const std::size_t K = g.patch();
  const std::size_t P = g.positions();
  for (std::size_t oc = 0; oc < g.out.channels; ++oc) {
    const T* d = dout.data() + oc * P;
    T bsum = 0;
    for (std::size_t p = 0; p < P; ++p) bsum += d[p];
    dbias[oc] += bsum;
    T* dw = dweight.data() + oc * K;
    for (std::size_t kk = 0; kk < K; ++kk) {
      const T* c = col.data() + kk * P;
      T acc = 0;
      for (std::size_t p = 0; p < P; ++p) acc += d[p] * c[p];
      dw[kk] += acc;
    }
  }
  if (din.empty()) return;
  std::vector<T> dcol(K * P, T(0));
  for (std::size_t oc = 0; oc < g.out.channels; ++oc) {
    const T* d = dout.data() + oc * P;
    const T* w = weight.data() + oc * K;
    for (std::size_t kk = 0; kk < K; ++kk) {
      const T wk = w[kk];
      T* dc = dcol.data() + kk * P;
      for (std::size_t p = 0; p < P; ++p) dc[p] += wk * d[p];
    }
  }
  col2im<T>(dcol, g, din);
}

template <typename T>
void max_pool_forward(std::span<const T> in, Shape in_shape, Shape out_shape, std::size_t kernel,
                      std::size_t stride, std::span<T> out, std::vector<std::uint32_t>& argmax) {
  argmax.resize(out_shape.size());
  for (std::size_t c = 0; c < out_shape.channels; ++c) {
    const std::size_t plane = c * in_shape.height * in_shape.width;
    for (std::size_t oy = 0; oy < out_shape.height; ++oy) {
      for (std::size_t ox = 0; ox < out_shape.width; ++ox) {
        std::size_t best = plane + (oy * stride) * in_shape.width + ox * stride;
        T best_value = in[best];
        for (std::size_t ky = 0; ky < kernel; ++ky) {
          for (std::size_t kx = 0; kx < kernel; ++kx) {
            const std::size_t idx =
                plane + (oy * stride + ky) * in_shape.width + (ox * stride + kx);
            if (in[idx] > best_value) {
              best_value = in[idx];
              best = idx;
            }
          }
        }
        const std::size_t o = (c * out_shape.height + oy) * out_shape.width + ox;
        out[o] = best_value;
        argmax[o] = static_cast<std::uint32_t>(best);
      }
    }
  }
}

template <typename T>
void max_pool_backward(std::span<const T> dout, std::span<const std::uint32_t> argmax,
                       std::span<T> din) {
  for (std::size_t o = 0; o < dout.size(); ++o) din[argmax[o]] += dout[o];
}

template <typename T>
void lrn_forward(std::span<const T> in, Shape shape, const LayerSpec& spec, std::span<T> out,
                 std::vector<T>& scale) {
  const std::size_t C = shape.channels;
  const std::size_t HW = shape.height * shape.width;
  const auto half = static_cast<std::ptrdiff_t>(spec.lrn_size / 2);
  const T alpha = static_cast<T>(spec.lrn_alpha);
  const T k = static_cast<T>(spec.lrn_k);
  const T beta = static_cast<T>(spec.lrn_beta);
  scale.assign(in.size(), T(0));
  for (std::size_t c = 0; c < C; ++c) {
    const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(c) - half);
    const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(C) - 1,
                                             static_cast<std::ptrdiff_t>(c) + half);
    T* s = scale.data() + c * HW;
    for (auto cc = lo; cc <= hi; ++cc) {
      const T* x = in.data() + static_cast<std::size_t>(cc) * HW;
      for (std::size_t i = 0; i < HW; ++i) s[i] += x[i] * x[i];
    }
    const T* x = in.data() + c * HW;
    T* y = out.data() + c * HW;
    for (std::size_t i = 0; i < HW; ++i) {
      s[i] = k + alpha * s[i];
      y[i] = x[i] * std::pow(s[i], -beta);
    }
  }
}

template <typename T>
void lrn_backward(std::span<const T> in, std::span<const T> out, std::span<const T> dout,
                  std::span<const T> scale, Shape shape, const LayerSpec& spec,
                  std::span<T> din) {
  const std::size_t C = shape.channels;
  const std::size_t HW = shape.height * shape.width;
  const auto half = static_cast<std::ptrdiff_t>(spec.lrn_size / 2);
  const T alpha = static_cast<T>(spec.lrn_alpha);
  const T beta = static_cast<T>(spec.lrn_beta);
  // ratio_c = dout_c * y_c / scale_c, summed over each channel's window.
  std::vector<T> ratio(in.size());
  for (std::size_t i = 0; i < ratio.size(); ++i) ratio[i] = dout[i] * out[i] / scale[i];
  const T coeff = T(2) * alpha * beta;
  for (std::size_t c = 0; c < C; ++c) {
    const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(c) - half);
    const auto hi = std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(C) - 1,
                                             static_cast<std::ptrdiff_t>(c) + half);
    const T* x = in.data() + c * HW;
    const T* s = scale.data() + c * HW;
    const T* dy = dout.data() + c * HW;
    T* dx = din.data() + c * HW;
    for (std::size_t i = 0; i < HW; ++i) dx[i] += dy[i] * std::pow(s[i], -beta);
    for (auto cc = lo; cc <= hi; ++cc) {
      const T* r = ratio.data() + static_cast<std::size_t>(cc) * HW;
      for (std::size_t i = 0; i < HW; ++i) dx[i] -= coeff * x[i] * r[i];
    }
  }
}

template <typename T>
void fc_forward(std::span<const T> in, std::span<const T> weight, std::span<const T> bias,
                std::span<T> out) {
  const std::size_t I = in.size();
  for (std::size_t o = 0; o < out.size(); ++o) {
    const T* w = weight.data() + o * I;
    T acc = bias[o];
    for (std::size_t i = 0; i < I; ++i) acc += w[i] * in[i];
    out[o] = acc;
  }
}

template <typename T>
void fc_backward(std::span<const T> in, std::span<const T> dout, std::span<const T> weight,
                 std::span<T> dweight, std::span<T> dbias, std::span<T> din) {
  const std::size_t I = in.size();
  for (std::size_t o = 0; o < dout.size(); ++o) {
    const T d = dout[o];
    dbias[o] += d;
    if (d == T(0)) continue;
    T* dw = dweight.data() + o * I;
    for (std::size_t i = 0; i < I; ++i) dw[i] += d * in[i];
    if (!din.empty()) {
      const T* w = weight.data() + o * I;
      for (std::size_t i = 0; i < I; ++i) din[i] += d * w[i];
    }
  }
}

template <typename T>
void softmax(std::span<const T> logits, std::span<T> probs) {
  const T peak = *std::max_element(logits.begin(), logits.end());
  T sum = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - peak);
    sum += probs[i];
  }
  for (auto& p : probs) p /= sum;
}

#define RADARNET_INSTANTIATE_KERNELS(T)                                                         \
  template void im2col<T>(std::span<const T>, const ConvGeometry&, std::vector<T>&);            \
  template void col2im<T>(std::span<const T>, const ConvGeometry&, std::span<T>);               \
  template void conv_forward<T>(std::span<const T>, std::span<const T>, std::span<const T>,     \
                                const ConvGeometry&, std::span<T>, std::vector<T>&);            \
  template void conv_backward<T>(std::span<const T>, std::span<const T>, std::span<const T>,    \
                                 const ConvGeometry&, std::span<T>, std::span<T>, std::span<T>, \
                                 std::vector<T>&);                                              \
  template void max_pool_forward<T>(std::span<const T>, Shape, Shape, std::size_t,             \
                                    std::size_t, std::span<T>, std::vector<std::uint32_t>&);    \
  template void max_pool_backward<T>(std::span<const T>, std::span<const std::uint32_t>,       \
                                     std::span<T>);                                             \
  template void lrn_forward<T>(std::span<const T>, Shape, const LayerSpec&, std::span<T>,      \
                               std::vector<T>&);                                                \
  template void lrn_backward<T>(std::span<const T>, std::span<const T>, std::span<const T>,    \
                                std::span<const T>, Shape, const LayerSpec&, std::span<T>);     \
  template void fc_forward<T>(std::span<const T>, std::span<const T>, std::span<const T>,      \
                              std::span<T>);                                                    \
  template void fc_backward<T>(std::span<const T>, std::span<const T>, std::span<const T>,     \
                               std::span<T>, std::span<T>, std::span<T>);                       \
  template void softmax<T>(std::span<const T>, std::span<T>);

RADARNET_INSTANTIATE_KERNELS(float)
RADARNET_INSTANTIATE_KERNELS(double)

#undef RADARNET_INSTANTIATE_KERNELS

}  // namespace radarnet::nn::kernels
