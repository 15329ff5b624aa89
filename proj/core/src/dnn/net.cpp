#include "net.hpp"

#include <algorithm>
#include <cmath>

#include "approxmul/dnn/layers.hpp"

namespace approxmul::dnn::detail {

Gradients::Gradients(const LeNetModel& model) {
  for (const auto& l : model.layers) {
    weight.emplace_back(l.weight.size(), 0.0f);
    bias.emplace_back(l.bias.size(), 0.0f);
  }
}

void Gradients::zero() {
  for (auto& w : weight) std::fill(w.begin(), w.end(), 0.0f);
  for (auto& b : bias) std::fill(b.begin(), b.end(), 0.0f);
}

Network::Network(const LeNetModel& model) : caches_(model.layers.size()) {
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto& s = model.layers[i].spec;
    auto& c = caches_[i];
    c.input.resize(s.input_count());
    c.out.resize(s.output_count());
    c.mask.resize(s.output_count());
    if (s.pool_after) {
      c.pooled.resize(s.output_count() / 4);
      c.argmax.resize(s.output_count() / 4);
    }
  }
}

std::span<const float> Network::forward(const LeNetModel& model, std::span<const float> input) {
  std::span<const float> x = input;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto& layer = model.layers[i];
    const auto& s = layer.spec;
    auto& c = caches_[i];
    std::copy(x.begin(), x.end(), c.input.begin());
    c.weight_hat.clear();
    if (s.kind == LayerKind::Conv)
      layers::conv2d_forward(c.input, s.in_channels, s.in_size, s.in_size, layer.weight, layer.bias, s.out_channels,
                             s.kernel, s.padding, c.out);
    else
      layers::dense_forward(c.input, layer.weight, layer.bias, c.out);
    for (std::size_t k = 0; k < c.out.size(); ++k) {
      if (s.relu) {
        c.mask[k] = c.out[k] > 0.0f;
        if (!c.mask[k]) c.out[k] = 0.0f;
      } else {
        c.mask[k] = 1;
      }
    }
    if (s.pool_after) layers::maxpool2_forward(c.out, s.out_channels, s.out_size(), s.out_size(), c.pooled, c.argmax);
    x = c.result();
  }
  return x;
}

std::span<const float> Network::forward_lut(const LeNetModel& model, std::span<const float> input,
                                            const Calibration& params, const LutView& lut) {
  std::span<const float> x = input;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto& layer = model.layers[i];
    const auto& s = layer.spec;
    auto& c = caches_[i];
    const QuantParams& in_p = i == 0 ? params.input : params.outputs[i - 1];
    const bool last = i + 1 == model.layers.size();

    QuantizedTensor xq;
    if (s.kind == LayerKind::Conv)
      xq = quantize_tensor(x, {s.in_channels, s.in_size, s.in_size}, in_p);
    else
      xq = quantize_tensor(x, {s.in_channels}, in_p);
    for (std::size_t k = 0; k < xq.codes.size(); ++k) c.input[k] = static_cast<float>(in_p.dequantize(xq.codes[k]));

    const QuantizedTensor wq = quantize_tensor(layer.weight, s.weight_shape(), params.weights[i]);
    c.weight_hat = dequantize_tensor(wq);

    const auto acc = s.kind == LayerKind::Conv ? lut_conv2d_acc(xq, wq, layer.bias, lut, 1, s.padding)
                                               : lut_linear_acc(xq, wq, layer.bias, lut);
    if (last) {
      const double scale = in_p.scale * wq.params.scale;
      for (std::size_t k = 0; k < acc.size(); ++k) {
        c.out[k] = static_cast<float>(scale * static_cast<double>(acc[k]));
        c.mask[k] = 1;
      }
    } else {
      const QuantParams& out_p = params.outputs[i];
      const double m = in_p.scale * wq.params.scale / out_p.scale;
      for (std::size_t k = 0; k < acc.size(); ++k) {
        const std::uint8_t code = requantize(acc[k], m, out_p.zero_point);
        float v = static_cast<float>(out_p.dequantize(code));
        if (s.relu && v < 0.0f) v = 0.0f;
        c.out[k] = v;
        c.mask[k] = code > out_p.zero_point && code < 255;
      }
    }
    if (s.pool_after) layers::maxpool2_forward(c.out, s.out_channels, s.out_size(), s.out_size(), c.pooled, c.argmax);
    x = c.result();
  }
  return x;
}

void Network::backward(const LeNetModel& model, std::span<const float> grad_logits, Gradients& grads) {
  grad_a_.assign(grad_logits.begin(), grad_logits.end());
  for (std::size_t ii = model.layers.size(); ii-- > 0;) {
    const auto& layer = model.layers[ii];
    const auto& s = layer.spec;
    auto& c = caches_[ii];
    if (s.pool_after) {
      grad_b_.assign(c.out.size(), 0.0f);
      layers::maxpool2_backward(grad_a_, c.argmax, grad_b_);
      grad_a_.swap(grad_b_);
    }
    for (std::size_t k = 0; k < grad_a_.size(); ++k)
      if (!c.mask[k]) grad_a_[k] = 0.0f;

    const std::vector<float>& w = c.weight_hat.empty() ? layer.weight : c.weight_hat;
    std::span<float> grad_in;
    if (ii > 0) {
      grad_b_.assign(s.input_count(), 0.0f);
      grad_in = grad_b_;
    }
    if (s.kind == LayerKind::Conv)
      layers::conv2d_backward(c.input, s.in_channels, s.in_size, s.in_size, w, s.out_channels, s.kernel, s.padding,
                              grad_a_, grads.weight[ii], grads.bias[ii], grad_in);
    else
      layers::dense_backward(c.input, w, grad_a_, grads.weight[ii], grads.bias[ii], grad_in);
    if (ii > 0) grad_a_.swap(grad_b_);
  }
}

double softmax_xent(std::span<const float> logits, std::size_t label, std::span<float> grad) {
  const float mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) sum += std::exp(static_cast<double>(logits[k] - mx));
  for (std::size_t k = 0; k < logits.size(); ++k)
    grad[k] = static_cast<float>(std::exp(static_cast<double>(logits[k] - mx)) / sum) - (k == label ? 1.0f : 0.0f);
  return std::log(sum) - static_cast<double>(logits[label] - mx);
}

std::size_t argmax(std::span<const float> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace approxmul::dnn::detail
