#pragma once

#include <cstdint>
#include <span>

// Float reference kernels, single image, CHW layout, stride 1.
namespace approxmul::dnn::layers {

/// out[oc][y][x] = bias[oc] + sum in_padded[ic][y+ky][x+kx] * w[oc][ic][ky][kx]
void conv2d_forward(std::span<const float> in, std::size_t channels, std::size_t height, std::size_t width,
                    std::span<const float> weight, std::span<const float> bias, std::size_t out_channels,
                    std::size_t kernel, std::size_t padding, std::span<float> out);

/// Accumulates into grad_weight/grad_bias; writes grad_in when non-empty.
void conv2d_backward(std::span<const float> in, std::size_t channels, std::size_t height, std::size_t width,
                     std::span<const float> weight, std::size_t out_channels, std::size_t kernel,
                     std::size_t padding, std::span<const float> grad_out, std::span<float> grad_weight,
                     std::span<float> grad_bias, std::span<float> grad_in);

void dense_forward(std::span<const float> in, std::span<const float> weight, std::span<const float> bias,
                   std::span<float> out);
void dense_backward(std::span<const float> in, std::span<const float> weight, std::span<const float> grad_out,
                    std::span<float> grad_weight, std::span<float> grad_bias, std::span<float> grad_in);

/// 2x2 max pooling, stride 2. `argmax` receives the flat input index of each output.
void maxpool2_forward(std::span<const float> in, std::size_t channels, std::size_t height, std::size_t width,
                      std::span<float> out, std::span<std::uint32_t> argmax);
void maxpool2_backward(std::span<const float> grad_out, std::span<const std::uint32_t> argmax,
                       std::span<float> grad_in);

}  // namespace approxmul::dnn::layers
