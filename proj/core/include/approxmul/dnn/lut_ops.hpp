#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "approxmul/aggregate.hpp"
#include "approxmul/dnn/quantize.hpp"

namespace approxmul::dnn {

/// Product table reorganized by weight code: column(w)[a] = lut(a, w).
class LutView {
 public:
  explicit LutView(const Lut16& lut);

  const std::uint32_t* column(std::uint8_t w) const noexcept { return by_weight_.data() + std::size_t{w} * 256; }
  std::uint32_t operator()(std::uint8_t a, std::uint8_t w) const noexcept { return column(w)[a]; }
  bool is_exact() const noexcept { return exact_; }

 private:
  std::vector<std::uint32_t> by_weight_;
  bool exact_;
};

/// Accumulators beyond this magnitude abort the layer.
inline constexpr std::int64_t kAccumulatorLimit = std::int64_t{1} << 31;

std::int32_t quantize_bias(float bias, double input_scale, double weight_scale);

/// sum_k lut(a_k, w_k) - z_w sum a_k - z_a sum w_k + K z_a z_w + bias_q, per output.
/// `inputs` is read flat (K values); `weights` has shape [N, K].
std::vector<std::int64_t> lut_linear_acc(const QuantizedTensor& inputs, const QuantizedTensor& weights,
                                         std::span<const float> bias, const LutView& lut);
QuantizedTensor lut_linear(const QuantizedTensor& inputs, const QuantizedTensor& weights,
                           std::span<const float> bias, const LutView& lut, const QuantParams& out_params);

/// `inputs` [C, H, W], `kernels` [OC, C, K, K]. Padding uses the input zero point.
std::vector<std::int64_t> lut_conv2d_acc(const QuantizedTensor& inputs, const QuantizedTensor& kernels,
                                         std::span<const float> bias, const LutView& lut, std::size_t stride,
                                         std::size_t padding);
QuantizedTensor lut_conv2d(const QuantizedTensor& inputs, const QuantizedTensor& kernels,
                           std::span<const float> bias, const LutView& lut, const QuantParams& out_params,
                           std::size_t stride, std::size_t padding);

/// Requantizes accumulators with multiplier in_scale * w_scale / out_scale.
QuantizedTensor requantize_all(std::span<const std::int64_t> acc, std::vector<std::size_t> shape,
                               double input_scale, double weight_scale, const QuantParams& out_params);

/// Integer affine kernels computing sum_k (a_k - z_a)(w_k - z_w) + bias_q directly.
namespace reference {
std::vector<std::int64_t> linear_acc(const QuantizedTensor& inputs, const QuantizedTensor& weights,
                                     std::span<const float> bias);
std::vector<std::int64_t> conv2d_acc(const QuantizedTensor& inputs, const QuantizedTensor& kernels,
                                     std::span<const float> bias, std::size_t stride, std::size_t padding);
}  // namespace reference

}  // namespace approxmul::dnn
