#include "approxmul/dnn/lut_ops.hpp"

#include <cstdlib>
#include <limits>

#include "approxmul/error.hpp"

namespace approxmul::dnn {
namespace {

void guard(std::int64_t v) {
  if (v >= kAccumulatorLimit || v <= -kAccumulatorLimit)
    throw DomainError("accumulator overflow: " + std::to_string(v) + " exceeds 2^31");
}

struct ConvGeometry {
  std::size_t c, h, w, oc, k, hp, wp, oh, ow, stride, padding;
};

ConvGeometry conv_geometry(const QuantizedTensor& in, const QuantizedTensor& ker, std::span<const float> bias,
                           std::size_t stride, std::size_t padding) {
  in.validate();
  ker.validate();
  if (in.shape.size() != 3 || ker.shape.size() != 4) throw DomainError("conv2d: expected [C,H,W] and [OC,C,K,K]");
  if (ker.shape[1] != in.shape[0] || ker.shape[2] != ker.shape[3]) throw DomainError("conv2d: kernel shape mismatch");
  if (bias.size() != ker.shape[0]) throw DomainError("conv2d: bias size mismatch");
  if (stride == 0) throw DomainError("conv2d: stride must be positive");
  ConvGeometry g{};
  g.c = in.shape[0];
  g.h = in.shape[1];
  g.w = in.shape[2];
  g.oc = ker.shape[0];
  g.k = ker.shape[2];
  g.hp = g.h + 2 * padding;
  g.wp = g.w + 2 * padding;
  if (g.k > g.hp || g.k > g.wp) throw DomainError("conv2d: kernel larger than padded input");
  g.oh = (g.hp - g.k) / stride + 1;
  g.ow = (g.wp - g.k) / stride + 1;
  g.stride = stride;
  g.padding = padding;
  return g;
}

std::vector<std::uint8_t> pad_codes(const QuantizedTensor& in, const ConvGeometry& g) {
  if (g.padding == 0) return in.codes;
  std::vector<std::uint8_t> out(g.c * g.hp * g.wp, in.params.zero_point);
  for (std::size_t ch = 0; ch < g.c; ++ch)
    for (std::size_t y = 0; y < g.h; ++y)
      std::copy_n(in.codes.data() + (ch * g.h + y) * g.w, g.w,
                  out.data() + (ch * g.hp + y + g.padding) * g.wp + g.padding);
  return out;
}

void check_linear(const QuantizedTensor& in, const QuantizedTensor& w, std::span<const float> bias) {
  in.validate();
  w.validate();
  if (w.shape.size() != 2 || w.shape[1] != in.codes.size())
    throw DomainError("linear: weights must be [N, K] with K = " + std::to_string(in.codes.size()));
  if (bias.size() != w.shape[0]) throw DomainError("linear: bias size mismatch");
}

}  // namespace

LutView::LutView(const Lut16& lut) : by_weight_(Lut16::kEntries), exact_(lut.is_exact()) {
  for (std::size_t a = 0; a < 256; ++a)
    for (std::size_t w = 0; w < 256; ++w) by_weight_[w * 256 + a] = lut.entries()[(a << 8) | w];
}

std::int32_t quantize_bias(float bias, double input_scale, double weight_scale) {
  const std::int64_t q = round_half_away(static_cast<double>(bias) / (input_scale * weight_scale));
  guard(q);
  return static_cast<std::int32_t>(q);
}

std::vector<std::int64_t> lut_linear_acc(const QuantizedTensor& inputs, const QuantizedTensor& weights,
                                         std::span<const float> bias, const LutView& lut) {
  check_linear(inputs, weights, bias);
  const std::size_t n = weights.shape[0], k = weights.shape[1];
  const std::int64_t za = inputs.params.zero_point, zw = weights.params.zero_point;
  std::int64_t sum_a = 0;
  for (auto a : inputs.codes) sum_a += a;

  std::vector<std::int64_t> acc(n);
  for (std::size_t o = 0; o < n; ++o) {
    const std::uint8_t* w = weights.codes.data() + o * k;
    std::int64_t prod = 0, sum_w = 0;
    for (std::size_t i = 0; i < k; ++i) {
      prod += lut.column(w[i])[inputs.codes[i]];
      sum_w += w[i];
    }
    guard(prod);
    const std::int64_t v = prod - zw * sum_a - za * sum_w + static_cast<std::int64_t>(k) * za * zw +
                           quantize_bias(bias[o], inputs.params.scale, weights.params.scale);
    guard(v);
    acc[o] = v;
  }
  return acc;
}

QuantizedTensor requantize_all(std::span<const std::int64_t> acc, std::vector<std::size_t> shape,
                               double input_scale, double weight_scale, const QuantParams& out_params) {
  QuantizedTensor t{std::move(shape), std::vector<std::uint8_t>(acc.size()), out_params};
  const double m = input_scale * weight_scale / out_params.scale;
  for (std::size_t i = 0; i < acc.size(); ++i) t.codes[i] = requantize(acc[i], m, out_params.zero_point);
  t.validate();
  return t;
}

QuantizedTensor lut_linear(const QuantizedTensor& inputs, const QuantizedTensor& weights,
                           std::span<const float> bias, const LutView& lut, const QuantParams& out_params) {
  const auto acc = lut_linear_acc(inputs, weights, bias, lut);
  return requantize_all(acc, {weights.shape[0]}, inputs.params.scale, weights.params.scale, out_params);
}

std::vector<std::int64_t> lut_conv2d_acc(const QuantizedTensor& inputs, const QuantizedTensor& kernels,
                                         std::span<const float> bias, const LutView& lut, std::size_t stride,
                                         std::size_t padding) {
  const auto g = conv_geometry(inputs, kernels, bias, stride, padding);
  const auto src = pad_codes(inputs, g);
  const std::int64_t za = inputs.params.zero_point, zw = kernels.params.zero_point;
  const std::size_t plane = g.oh * g.ow;
  const std::int64_t taps = static_cast<std::int64_t>(g.c * g.k * g.k);

  std::vector<std::int64_t> window_sum(plane, 0);
  for (std::size_t ic = 0; ic < g.c; ++ic)
    for (std::size_t ky = 0; ky < g.k; ++ky)
      for (std::size_t kx = 0; kx < g.k; ++kx)
        for (std::size_t oy = 0; oy < g.oh; ++oy) {
          const std::uint8_t* s = src.data() + (ic * g.hp + oy * stride + ky) * g.wp + kx;
          for (std::size_t ox = 0; ox < g.ow; ++ox) window_sum[oy * g.ow + ox] += s[ox * stride];
        }

  std::vector<std::int64_t> acc(g.oc * plane);
  std::vector<std::int64_t> prod(plane);
  for (std::size_t oc = 0; oc < g.oc; ++oc) {
    std::fill(prod.begin(), prod.end(), 0);
    std::int64_t sum_w = 0;
    for (std::size_t ic = 0; ic < g.c; ++ic)
      for (std::size_t ky = 0; ky < g.k; ++ky)
        for (std::size_t kx = 0; kx < g.k; ++kx) {
          const std::uint8_t w = kernels.codes[((oc * g.c + ic) * g.k + ky) * g.k + kx];
          sum_w += w;
          const std::uint32_t* col = lut.column(w);
          for (std::size_t oy = 0; oy < g.oh; ++oy) {
            const std::uint8_t* s = src.data() + (ic * g.hp + oy * stride + ky) * g.wp + kx;
            std::int64_t* d = prod.data() + oy * g.ow;
            for (std::size_t ox = 0; ox < g.ow; ++ox) d[ox] += col[s[ox * stride]];
          }
        }
    const std::int64_t bias_q = quantize_bias(bias[oc], inputs.params.scale, kernels.params.scale);
    const std::int64_t constant = taps * za * zw - za * sum_w + bias_q;
    for (std::size_t p = 0; p < plane; ++p) {
      guard(prod[p]);
      const std::int64_t v = prod[p] - zw * window_sum[p] + constant;
      guard(v);
      acc[oc * plane + p] = v;
    }
  }
  return acc;
}

QuantizedTensor lut_conv2d(const QuantizedTensor& inputs, const QuantizedTensor& kernels,
                           std::span<const float> bias, const LutView& lut, const QuantParams& out_params,
                           std::size_t stride, std::size_t padding) {
  const auto g = conv_geometry(inputs, kernels, bias, stride, padding);
  const auto acc = lut_conv2d_acc(inputs, kernels, bias, lut, stride, padding);
  return requantize_all(acc, {g.oc, g.oh, g.ow}, inputs.params.scale, kernels.params.scale, out_params);
}

namespace reference {

std::vector<std::int64_t> linear_acc(const QuantizedTensor& inputs, const QuantizedTensor& weights,
                                     std::span<const float> bias) {
  check_linear(inputs, weights, bias);
  const std::size_t n = weights.shape[0], k = weights.shape[1];
  const int za = inputs.params.zero_point, zw = weights.params.zero_point;
  std::vector<std::int64_t> acc(n);
  for (std::size_t o = 0; o < n; ++o) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < k; ++i)
      s += static_cast<std::int64_t>(inputs.codes[i] - za) * (weights.codes[o * k + i] - zw);
    s += quantize_bias(bias[o], inputs.params.scale, weights.params.scale);
    guard(s);
    acc[o] = s;
  }
  return acc;
}

std::vector<std::int64_t> conv2d_acc(const QuantizedTensor& inputs, const QuantizedTensor& kernels,
                                     std::span<const float> bias, std::size_t stride, std::size_t padding) {
  const auto g = conv_geometry(inputs, kernels, bias, stride, padding);
  const int za = inputs.params.zero_point, zw = kernels.params.zero_point;
  std::vector<std::int64_t> acc(g.oc * g.oh * g.ow);
  for (std::size_t oc = 0; oc < g.oc; ++oc) {
    const std::int64_t bias_q = quantize_bias(bias[oc], inputs.params.scale, kernels.params.scale);
    for (std::size_t oy = 0; oy < g.oh; ++oy)
      for (std::size_t ox = 0; ox < g.ow; ++ox) {
        std::int64_t s = 0;
        for (std::size_t ic = 0; ic < g.c; ++ic)
          for (std::size_t ky = 0; ky < g.k; ++ky)
            for (std::size_t kx = 0; kx < g.k; ++kx) {
              const std::ptrdiff_t y = static_cast<std::ptrdiff_t>(oy * stride + ky) - static_cast<std::ptrdiff_t>(padding);
              const std::ptrdiff_t x = static_cast<std::ptrdiff_t>(ox * stride + kx) - static_cast<std::ptrdiff_t>(padding);
              const bool inside = y >= 0 && x >= 0 && y < static_cast<std::ptrdiff_t>(g.h) &&
                                  x < static_cast<std::ptrdiff_t>(g.w);
              const int a = inside ? inputs.codes[(ic * g.h + static_cast<std::size_t>(y)) * g.w + static_cast<std::size_t>(x)]
                                   : za;
              const int w = kernels.codes[((oc * g.c + ic) * g.k + ky) * g.k + kx];
              s += static_cast<std::int64_t>(a - za) * (w - zw);
            }
        s += bias_q;
        guard(s);
        acc[(oc * g.oh + oy) * g.ow + ox] = s;
      }
  }
  return acc;
}

}  // namespace reference
}  // namespace approxmul::dnn
