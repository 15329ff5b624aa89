#pragma once

// Float forward/backward engine shared by calibration, training and
// straight-through retraining. Internal to the library.

#include <span>
#include <vector>

#include "approxmul/dnn/inference.hpp"
#include "approxmul/dnn/lenet.hpp"
#include "approxmul/dnn/lut_ops.hpp"

namespace approxmul::dnn::detail {

struct LayerCache {
  std::vector<float> input;
  std::vector<float> out;
  std::vector<std::uint8_t> mask;
  std::vector<float> pooled;
  std::vector<std::uint32_t> argmax;
  /// Dequantized weights used by the forward pass (LUT mode only).
  std::vector<float> weight_hat;

  std::span<const float> result() const { return pooled.empty() ? std::span<const float>(out) : pooled; }
};

struct Gradients {
  std::vector<std::vector<float>> weight;
  std::vector<std::vector<float>> bias;

  explicit Gradients(const LeNetModel& model);
  void zero();
};

class Network {
 public:
  explicit Network(const LeNetModel& model);

  std::span<const float> forward(const LeNetModel& model, std::span<const float> input);
  /// Quantized forward through `lut` with weights quantized by `weight_params`.
  std::span<const float> forward_lut(const LeNetModel& model, std::span<const float> input,
                                     const Calibration& params, const LutView& lut);
  void backward(const LeNetModel& model, std::span<const float> grad_logits, Gradients& grads);

  const std::vector<LayerCache>& caches() const noexcept { return caches_; }

 private:
  std::vector<LayerCache> caches_;
  std::vector<float> grad_a_;
  std::vector<float> grad_b_;
};

/// Softmax cross-entropy; writes d loss / d logits and returns the loss.
double softmax_xent(std::span<const float> logits, std::size_t label, std::span<float> grad);
std::size_t argmax(std::span<const float> v);

}  // namespace approxmul::dnn::detail
