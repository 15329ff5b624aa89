#include "approxmul/dnn/layers.hpp"

#include <algorithm>
#include <vector>

#include "approxmul/error.hpp"

namespace approxmul::dnn::layers {
namespace {

std::vector<float> pad_input(std::span<const float> in, std::size_t c, std::size_t h, std::size_t w, std::size_t p) {
  const std::size_t hp = h + 2 * p, wp = w + 2 * p;
  std::vector<float> out(c * hp * wp, 0.0f);
  for (std::size_t ch = 0; ch < c; ++ch)
    for (std::size_t y = 0; y < h; ++y)
      std::copy_n(in.data() + (ch * h + y) * w, w, out.data() + (ch * hp + y + p) * wp + p);
  return out;
}

}  // namespace

void conv2d_forward(std::span<const float> in, std::size_t channels, std::size_t height, std::size_t width,
                    std::span<const float> weight, std::span<const float> bias, std::size_t out_channels,
                    std::size_t kernel, std::size_t padding, std::span<float> out) {
  const std::size_t hp = height + 2 * padding, wp = width + 2 * padding;
  const std::size_t oh = hp - kernel + 1, ow = wp - kernel + 1;
  if (in.size() != channels * height * width || weight.size() != out_channels * channels * kernel * kernel ||
      bias.size() != out_channels || out.size() != out_channels * oh * ow)
    throw DomainError("conv2d_forward: shape mismatch");

  std::vector<float> padded;
  const float* src = in.data();
  if (padding) {
    padded = pad_input(in, channels, height, width, padding);
    src = padded.data();
  }
  for (std::size_t oc = 0; oc < out_channels; ++oc) {
    float* dst = out.data() + oc * oh * ow;
    std::fill_n(dst, oh * ow, bias[oc]);
    for (std::size_t ic = 0; ic < channels; ++ic) {
      const float* wk = weight.data() + (oc * channels + ic) * kernel * kernel;
      const float* plane = src + ic * hp * wp;
      for (std::size_t ky = 0; ky < kernel; ++ky)
        for (std::size_t kx = 0; kx < kernel; ++kx) {
          const float wv = wk[ky * kernel + kx];
          for (std::size_t oy = 0; oy < oh; ++oy) {
            const float* s = plane + (oy + ky) * wp + kx;
            float* d = dst + oy * ow;
            for (std::size_t ox = 0; ox < ow; ++ox) d[ox] += wv * s[ox];
          }
        }
    }
  }
}

void conv2d_backward(std::span<const float> in, std::size_t channels, std::size_t height, std::size_t width,
                     std::span<const float> weight, std::size_t out_channels, std::size_t kernel,
                     std::size_t padding, std::span<const float> grad_out, std::span<float> grad_weight,
                     std::span<float> grad_bias, std::span<float> grad_in) {
  const std::size_t hp = height + 2 * padding, wp = width + 2 * padding;
  const std::size_t oh = hp - kernel + 1, ow = wp - kernel + 1;
  if (grad_out.size() != out_channels * oh * ow || grad_weight.size() != weight.size() ||
      grad_bias.size() != out_channels)
    throw DomainError("conv2d_backward: shape mismatch");

  std::vector<float> padded;
  const float* src = in.data();
  if (padding) {
    padded = pad_input(in, channels, height, width, padding);
    src = padded.data();
  }
  std::vector<float> gin_p;
  if (!grad_in.empty()) gin_p.assign(channels * hp * wp, 0.0f);

  for (std::size_t oc = 0; oc < out_channels; ++oc) {
    const float* g = grad_out.data() + oc * oh * ow;
    float gb = 0.0f;
    for (std::size_t i = 0; i < oh * ow; ++i) gb += g[i];
    grad_bias[oc] += gb;
    for (std::size_t ic = 0; ic < channels; ++ic) {
      const std::size_t wbase = (oc * channels + ic) * kernel * kernel;
      const float* plane = src + ic * hp * wp;
      float* gplane = gin_p.empty() ? nullptr : gin_p.data() + ic * hp * wp;
      for (std::size_t ky = 0; ky < kernel; ++ky)
        for (std::size_t kx = 0; kx < kernel; ++kx) {
          const float wv = weight[wbase + ky * kernel + kx];
          float gw = 0.0f;
          for (std::size_t oy = 0; oy < oh; ++oy) {
            const float* s = plane + (oy + ky) * wp + kx;
            const float* gr = g + oy * ow;
            for (std::size_t ox = 0; ox < ow; ++ox) gw += gr[ox] * s[ox];
            if (gplane) {
              float* d = gplane + (oy + ky) * wp + kx;
              for (std::size_t ox = 0; ox < ow; ++ox) d[ox] += wv * gr[ox];
            }
          }
          grad_weight[wbase + ky * kernel + kx] += gw;
        }
    }
  }
  if (!grad_in.empty()) {
    if (grad_in.size() != channels * height * width) throw DomainError("conv2d_backward: grad_in shape mismatch");
    for (std::size_t ch = 0; ch < channels; ++ch)
      for (std::size_t y = 0; y < height; ++y)
        std::copy_n(gin_p.data() + (ch * hp + y + padding) * wp + padding, width,
                    grad_in.data() + (ch * height + y) * width);
  }
}

void dense_forward(std::span<const float> in, std::span<const float> weight, std::span<const float> bias,
                   std::span<float> out) {
  const std::size_t k = in.size(), n = out.size();
  if (weight.size() != n * k || bias.size() != n) throw DomainError("dense_forward: shape mismatch");
  for (std::size_t o = 0; o < n; ++o) {
    const float* w = weight.data() + o * k;
    float s = 0.0f;
    for (std::size_t i = 0; i < k; ++i) s += w[i] * in[i];
    out[o] = s + bias[o];
  }
}

void dense_backward(std::span<const float> in, std::span<const float> weight, std::span<const float> grad_out,
                    std::span<float> grad_weight, std::span<float> grad_bias, std::span<float> grad_in) {
  const std::size_t k = in.size(), n = grad_out.size();
  if (weight.size() != n * k || grad_weight.size() != n * k || grad_bias.size() != n)
    throw DomainError("dense_backward: shape mismatch");
  if (!grad_in.empty()) std::fill(grad_in.begin(), grad_in.end(), 0.0f);
  for (std::size_t o = 0; o < n; ++o) {
    const float g = grad_out[o];
    grad_bias[o] += g;
    float* gw = grad_weight.data() + o * k;
    for (std::size_t i = 0; i < k; ++i) gw[i] += g * in[i];
    if (!grad_in.empty()) {
      const float* w = weight.data() + o * k;
      for (std::size_t i = 0; i < k; ++i) grad_in[i] += g * w[i];
    }
  }
}

void maxpool2_forward(std::span<const float> in, std::size_t channels, std::size_t height, std::size_t width,
                      std::span<float> out, std::span<std::uint32_t> argmax) {
  const std::size_t oh = height / 2, ow = width / 2;
  if (in.size() != channels * height * width || out.size() != channels * oh * ow || argmax.size() != out.size())
    throw DomainError("maxpool2_forward: shape mismatch");
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t x = 0; x < ow; ++x) {
        std::size_t best = (c * height + 2 * y) * width + 2 * x;
        for (std::size_t dy = 0; dy < 2; ++dy)
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t idx = (c * height + 2 * y + dy) * width + 2 * x + dx;
            if (in[idx] > in[best]) best = idx;
          }
        const std::size_t o = (c * oh + y) * ow + x;
        out[o] = in[best];
        argmax[o] = static_cast<std::uint32_t>(best);
      }
}

void maxpool2_backward(std::span<const float> grad_out, std::span<const std::uint32_t> argmax,
                       std::span<float> grad_in) {
  std::fill(grad_in.begin(), grad_in.end(), 0.0f);
  for (std::size_t o = 0; o < grad_out.size(); ++o) grad_in[argmax[o]] += grad_out[o];
}

}  // namespace approxmul::dnn::layers
