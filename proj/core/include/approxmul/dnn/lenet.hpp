#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace approxmul::dnn {

enum class LayerKind { Conv, Dense };

/// One learned layer of the fixed LeNet topology.
struct LayerSpec {
  std::string name;
  LayerKind kind = LayerKind::Conv;
  std::size_t in_channels = 0;   // Dense: input features
  std::size_t out_channels = 0;  // Dense: output features
  std::size_t kernel = 0;
  std::size_t padding = 0;
  std::size_t in_size = 0;       // input spatial side (Conv only)
  bool relu = true;
  bool pool_after = false;

  std::size_t out_size() const noexcept { return in_size + 2 * padding - kernel + 1; }
  std::size_t weight_count() const noexcept {
    return kind == LayerKind::Conv ? out_channels * in_channels * kernel * kernel : out_channels * in_channels;
  }
  std::size_t input_count() const noexcept {
    return kind == LayerKind::Conv ? in_channels * in_size * in_size : in_channels;
  }
  std::size_t output_count() const noexcept {
    return kind == LayerKind::Conv ? out_channels * out_size() * out_size() : out_channels;
  }
  std::vector<std::size_t> weight_shape() const;
};

/// Side length of the zero-padded network input.
inline constexpr std::size_t kInputSide = 32;
inline constexpr std::size_t kNumClasses = 10;

/// conv(1->6,5x5) pool conv(6->16,5x5) pool [conv(16->16,3x3,pad 1)] dense 400->120->84->10.
std::vector<LayerSpec> lenet_topology(bool plus);

struct TrainingRecord {
  std::size_t epochs = 0;
  double learning_rate = 0.0;
  double l2 = 0.0;
  std::uint64_t seed = 0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;

  bool operator==(const TrainingRecord&) const = default;
};

struct LeNetLayer {
  LayerSpec spec;
  std::vector<float> weight;
  std::vector<float> bias;
};

struct LeNetModel {
  bool plus = false;
  std::vector<LeNetLayer> layers;
  TrainingRecord record;

  /// He-uniform initialization from `seed`.
  static LeNetModel create(bool plus, std::uint64_t seed);

  /// Sum of squared weights (biases excluded).
  double weight_l2() const noexcept;
  /// Throws ConsistencyError if parameter sizes do not match the topology.
  void validate() const;
};

/// Embeds a rows x cols image centered in the kInputSide square, scaled to [0,1].
std::vector<float> image_to_input(std::span<const std::uint8_t> image, std::size_t rows, std::size_t cols);
/// Same placement on 8-bit codes; padding uses code 0.
std::vector<std::uint8_t> image_to_codes(std::span<const std::uint8_t> image, std::size_t rows, std::size_t cols);

}  // namespace approxmul::dnn
