#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "approxmul/dnn/lenet.hpp"
#include "approxmul/dnn/lut_ops.hpp"
#include "approxmul/dnn/mnist.hpp"
#include "approxmul/dnn/quantize.hpp"
#include "approxmul/metrics.hpp"

namespace approxmul::dnn {

/// Per-tensor parameters for every multiplier operand in the network.
struct Calibration {
  QuantParams input;
  /// One entry per learned layer.
  std::vector<QuantParams> weights;
  /// Output of each learned layer (post-ReLU where the layer has one).
  std::vector<QuantParams> outputs;
  std::vector<std::string> warnings;

  bool operator==(const Calibration& o) const {
    return input == o.input && weights == o.weights && outputs == o.outputs;
  }
};

/// Min/max calibration on the first `count` images of `batch`.
Calibration calibrate(const LeNetModel& model, const Dataset& batch, std::size_t count = 2000);
/// Re-derives weight parameters from the current weights, keeping activation parameters.
void recalibrate_weights(const LeNetModel& model, Calibration& calibration);

struct QuantizedLayer {
  LayerSpec spec;
  QuantizedTensor weights;
  std::vector<float> bias;
  QuantParams input;
  QuantParams output;
};

struct QuantizedLeNet {
  bool plus = false;
  QuantParams input;
  std::vector<QuantizedLayer> layers;
};

QuantizedLeNet quantize_model(const LeNetModel& model, const Calibration& calibration);

/// Every intermediate tensor of one forward pass.
struct ForwardTrace {
  /// Output codes of each hidden learned layer, after pooling where present.
  std::vector<QuantizedTensor> activations;
  /// Final-layer accumulators; argmax gives the prediction.
  std::vector<std::int64_t> logits;
};

ForwardTrace forward_trace(const QuantizedLeNet& model, std::span<const std::uint8_t> image, std::size_t rows,
                           std::size_t cols, const LutView& lut);
/// Same pipeline with every product computed directly in integer arithmetic.
ForwardTrace reference_trace(const QuantizedLeNet& model, std::span<const std::uint8_t> image, std::size_t rows,
                             std::size_t cols);
std::size_t predict(const QuantizedLeNet& model, std::span<const std::uint8_t> image, std::size_t rows,
                    std::size_t cols, const LutView& lut);

struct EvalResult {
  std::string multiplier;
  std::size_t count = 0;
  std::size_t correct = 0;
  double top1_accuracy = 0.0;
  /// Percentage points: exact-multiplier accuracy minus this accuracy.
  double dal = 0.0;
  std::array<double, kNumClasses> per_class_accuracy{};
  std::vector<std::uint32_t> predictions;
};

/// Top-1 over the whole dataset, parallel over images. `baseline_accuracy`
/// (fraction) fixes the DAL reference; otherwise an exact-LUT run is made.
EvalResult infer(const QuantizedLeNet& model, const Dataset& data, const LutView& lut, const std::string& name,
                 unsigned threads = 1, std::optional<double> baseline_accuracy = std::nullopt);

/// Float-path top-1 accuracy.
double float_accuracy(const LeNetModel& model, const Dataset& data);

struct CodeHistogram {
  std::vector<CodeRange> ranges;
  std::vector<double> weight_fractions;
  std::vector<double> activation_fractions;
  std::size_t weight_codes = 0;
  std::size_t activation_codes = 0;
};

/// Range fractions of all weight codes and of the multiplier input (activation)
/// codes seen on the first `count` images of `batch`. Default ranges are
/// [0,31], [96,159] and their complement pieces.
CodeHistogram weight_code_histogram(const QuantizedLeNet& model, const Dataset& batch, std::size_t count = 500,
                                    std::vector<CodeRange> ranges = {});

}  // namespace approxmul::dnn
