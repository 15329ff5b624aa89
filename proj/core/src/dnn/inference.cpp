#include "approxmul/dnn/inference.hpp"

#include <algorithm>
#include <thread>

#include "approxmul/error.hpp"
#include "net.hpp"

namespace approxmul::dnn {

namespace {

// Input codes are the raw pixel values.
constexpr QuantParams kInputParams{1.0 / 255.0, 0};

QuantizedTensor maxpool_codes(const QuantizedTensor& in) {
  const std::size_t c = in.shape[0], h = in.shape[1], w = in.shape[2];
  QuantizedTensor out{{c, h / 2, w / 2}, std::vector<std::uint8_t>(c * (h / 2) * (w / 2)), in.params};
  std::size_t o = 0;
  for (std::size_t ch = 0; ch < c; ++ch)
    for (std::size_t y = 0; y < h / 2; ++y)
      for (std::size_t x = 0; x < w / 2; ++x) {
        const std::uint8_t* p = in.codes.data() + (ch * h + 2 * y) * w + 2 * x;
        out.codes[o++] = std::max({p[0], p[1], p[w], p[w + 1]});
      }
  return out;
}

template <class ConvAcc, class LinearAcc>
ForwardTrace run_trace(const QuantizedLeNet& model, std::span<const std::uint8_t> image, std::size_t rows,
                       std::size_t cols, ConvAcc conv, LinearAcc linear) {
  ForwardTrace trace;
  QuantizedTensor x{{1, kInputSide, kInputSide}, image_to_codes(image, rows, cols), model.input};
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto& layer = model.layers[i];
    const auto& s = layer.spec;
    std::vector<std::int64_t> acc;
    if (s.kind == LayerKind::Conv) {
      acc = conv(x, layer.weights, layer.bias, s.padding);
    } else {
      x.shape = {x.codes.size()};
      acc = linear(x, layer.weights, layer.bias);
    }
    if (i + 1 == model.layers.size()) {
      trace.logits = std::move(acc);
      break;
    }
    std::vector<std::size_t> shape =
        s.kind == LayerKind::Conv ? std::vector<std::size_t>{s.out_channels, s.out_size(), s.out_size()}
                                  : std::vector<std::size_t>{s.out_channels};
    QuantizedTensor y = requantize_all(acc, std::move(shape), x.params.scale, layer.weights.params.scale, layer.output);
    if (s.pool_after) y = maxpool_codes(y);
    trace.activations.push_back(y);
    x = std::move(y);
  }
  return trace;
}

std::size_t argmax_acc(const std::vector<std::int64_t>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

Calibration calibrate(const LeNetModel& model, const Dataset& batch, std::size_t count) {
  model.validate();
  count = std::min(count, batch.size());
  if (count == 0) throw DomainError("calibration needs at least one image");
  Calibration cal;
  cal.input = kInputParams;
  std::vector<double> lo(model.layers.size(), 0.0), hi(model.layers.size(), 0.0);
  detail::Network net(model);
  for (std::size_t n = 0; n < count; ++n) {
    const auto input = image_to_input(batch.image(n), batch.rows, batch.cols);
    net.forward(model, input);
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
      const auto [mn, mx] = std::minmax_element(net.caches()[i].out.begin(), net.caches()[i].out.end());
      lo[i] = std::min(lo[i], static_cast<double>(*mn));
      hi[i] = std::max(hi[i], static_cast<double>(*mx));
    }
  }
  for (std::size_t i = 0; i < model.layers.size(); ++i)
    cal.outputs.push_back(choose_params(lo[i], hi[i], &cal.warnings, model.layers[i].spec.name + ".output"));
  recalibrate_weights(model, cal);
  return cal;
}

void recalibrate_weights(const LeNetModel& model, Calibration& calibration) {
  calibration.weights.clear();
  for (const auto& l : model.layers)
    calibration.weights.push_back(calibrate_tensor(l.weight, &calibration.warnings, l.spec.name + ".weight"));
}

QuantizedLeNet quantize_model(const LeNetModel& model, const Calibration& calibration) {
  model.validate();
  if (calibration.weights.size() != model.layers.size() || calibration.outputs.size() != model.layers.size())
    throw ConsistencyError("calibration does not match model layer count");
  QuantizedLeNet q;
  q.plus = model.plus;
  q.input = calibration.input;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const auto& l = model.layers[i];
    q.layers.push_back({l.spec, quantize_tensor(l.weight, l.spec.weight_shape(), calibration.weights[i]), l.bias,
                        i == 0 ? calibration.input : calibration.outputs[i - 1], calibration.outputs[i]});
  }
  return q;
}

ForwardTrace forward_trace(const QuantizedLeNet& model, std::span<const std::uint8_t> image, std::size_t rows,
                           std::size_t cols, const LutView& lut) {
  return run_trace(
      model, image, rows, cols,
      [&](const QuantizedTensor& x, const QuantizedTensor& w, std::span<const float> b, std::size_t pad) {
        return lut_conv2d_acc(x, w, b, lut, 1, pad);
      },
      [&](const QuantizedTensor& x, const QuantizedTensor& w, std::span<const float> b) {
        return lut_linear_acc(x, w, b, lut);
      });
}

ForwardTrace reference_trace(const QuantizedLeNet& model, std::span<const std::uint8_t> image, std::size_t rows,
                             std::size_t cols) {
  return run_trace(
      model, image, rows, cols,
      [](const QuantizedTensor& x, const QuantizedTensor& w, std::span<const float> b, std::size_t pad) {
        return reference::conv2d_acc(x, w, b, 1, pad);
      },
      [](const QuantizedTensor& x, const QuantizedTensor& w, std::span<const float> b) {
        return reference::linear_acc(x, w, b);
      });
}

std::size_t predict(const QuantizedLeNet& model, std::span<const std::uint8_t> image, std::size_t rows,
                    std::size_t cols, const LutView& lut) {
  return argmax_acc(forward_trace(model, image, rows, cols, lut).logits);
}

EvalResult infer(const QuantizedLeNet& model, const Dataset& data, const LutView& lut, const std::string& name,
                 unsigned threads, std::optional<double> baseline_accuracy) {
  if (data.size() == 0) throw DomainError("evaluation dataset is empty");
  EvalResult r;
  r.multiplier = name;
  r.count = data.size();
  r.predictions.assign(data.size(), 0);

  threads = std::clamp(threads, 1u, static_cast<unsigned>(std::min<std::size_t>(data.size(), 256)));
  const std::size_t chunk = (data.size() + threads - 1) / threads;
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        try {
          const std::size_t end = std::min(data.size(), (t + 1) * chunk);
          for (std::size_t i = t * chunk; i < end; ++i)
            r.predictions[i] = static_cast<std::uint32_t>(predict(model, data.image(i), data.rows, data.cols, lut));
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::array<std::size_t, kNumClasses> seen{}, hit{};
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto label = data.labels[i];
    ++seen[label];
    if (r.predictions[i] == label) {
      ++hit[label];
      ++r.correct;
    }
  }
  for (std::size_t c = 0; c < kNumClasses; ++c)
    r.per_class_accuracy[c] = seen[c] ? static_cast<double>(hit[c]) / static_cast<double>(seen[c]) : 0.0;
  r.top1_accuracy = static_cast<double>(r.correct) / static_cast<double>(r.count);

  if (!baseline_accuracy) {
    baseline_accuracy = lut.is_exact()
                            ? r.top1_accuracy
                            : infer(model, data, LutView(Lut16::exact()), "exact8", threads).top1_accuracy;
  }
  r.dal = 100.0 * (*baseline_accuracy - r.top1_accuracy);
  return r;
}

double float_accuracy(const LeNetModel& model, const Dataset& data) {
  if (data.size() == 0) throw DomainError("evaluation dataset is empty");
  detail::Network net(model);
  std::size_t correct = 0;
  for (std::size_t n = 0; n < data.size(); ++n) {
    const auto logits = net.forward(model, image_to_input(data.image(n), data.rows, data.cols));
    correct += detail::argmax(logits) == data.labels[n];
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

CodeHistogram weight_code_histogram(const QuantizedLeNet& model, const Dataset& batch, std::size_t count,
                                    std::vector<CodeRange> ranges) {
  if (ranges.empty()) ranges = {{0, 31}, {32, 95}, {96, 159}, {160, 255}};
  CodeHistogram h;
  h.ranges = ranges;

  std::vector<std::uint8_t> weights;
  for (const auto& l : model.layers) weights.insert(weights.end(), l.weights.codes.begin(), l.weights.codes.end());

  std::vector<std::uint8_t> acts;
  const LutView exact(Lut16::exact());
  count = std::min(count, batch.size());
  for (std::size_t n = 0; n < count; ++n) {
    const auto input = image_to_codes(batch.image(n), batch.rows, batch.cols);
    acts.insert(acts.end(), input.begin(), input.end());
    const auto trace = forward_trace(model, batch.image(n), batch.rows, batch.cols, exact);
    for (const auto& a : trace.activations) acts.insert(acts.end(), a.codes.begin(), a.codes.end());
  }

  h.weight_codes = weights.size();
  h.activation_codes = acts.size();
  h.weight_fractions = range_histogram(weights, ranges);
  if (!acts.empty()) h.activation_fractions = range_histogram(acts, ranges);
  return h;
}

}  // namespace approxmul::dnn
