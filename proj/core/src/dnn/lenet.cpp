#include "approxmul/dnn/lenet.hpp"

#include <cmath>
#include <random>

#include "approxmul/error.hpp"

namespace approxmul::dnn {

std::vector<std::size_t> LayerSpec::weight_shape() const {
  if (kind == LayerKind::Conv) return {out_channels, in_channels, kernel, kernel};
  return {out_channels, in_channels};
}

std::vector<LayerSpec> lenet_topology(bool plus) {
  std::vector<LayerSpec> t;
  t.push_back({"conv1", LayerKind::Conv, 1, 6, 5, 0, kInputSide, true, true});
  t.push_back({"conv2", LayerKind::Conv, 6, 16, 5, 0, 14, true, true});
  if (plus) t.push_back({"conv3", LayerKind::Conv, 16, 16, 3, 1, 5, true, false});
  t.push_back({"fc1", LayerKind::Dense, 400, 120, 0, 0, 0, true, false});
  t.push_back({"fc2", LayerKind::Dense, 120, 84, 0, 0, 0, true, false});
  t.push_back({"fc3", LayerKind::Dense, 84, kNumClasses, 0, 0, 0, false, false});
  return t;
}

LeNetModel LeNetModel::create(bool plus, std::uint64_t seed) {
  LeNetModel m;
  m.plus = plus;
  m.record.seed = seed;
  std::mt19937_64 rng(seed);
  for (const auto& spec : lenet_topology(plus)) {
    LeNetLayer layer{spec, std::vector<float>(spec.weight_count()), std::vector<float>(spec.out_channels, 0.0f)};
    const std::size_t fan_in = spec.kind == LayerKind::Conv ? spec.in_channels * spec.kernel * spec.kernel
                                                            : spec.in_channels;
    const float bound = static_cast<float>(std::sqrt(6.0 / static_cast<double>(fan_in)));
    std::uniform_real_distribution<float> dist(-bound, bound);
    for (auto& w : layer.weight) w = dist(rng);
    m.layers.push_back(std::move(layer));
  }
  return m;
}

double LeNetModel::weight_l2() const noexcept {
  double s = 0.0;
  for (const auto& l : layers)
    for (float w : l.weight) s += static_cast<double>(w) * w;
  return s;
}

void LeNetModel::validate() const {
  const auto topo = lenet_topology(plus);
  if (topo.size() != layers.size()) throw ConsistencyError("model layer count does not match topology");
  for (std::size_t i = 0; i < topo.size(); ++i) {
    const auto& l = layers[i];
    if (l.spec.name != topo[i].name || l.weight.size() != topo[i].weight_count() ||
        l.bias.size() != topo[i].out_channels)
      throw ConsistencyError("layer " + topo[i].name + " parameters do not match topology");
  }
}

std::vector<float> image_to_input(std::span<const std::uint8_t> image, std::size_t rows, std::size_t cols) {
  if (rows > kInputSide || cols > kInputSide || image.size() != rows * cols)
    throw DomainError("image does not fit the network input");
  std::vector<float> out(kInputSide * kInputSide, 0.0f);
  const std::size_t oy = (kInputSide - rows) / 2, ox = (kInputSide - cols) / 2;
  for (std::size_t y = 0; y < rows; ++y)
    for (std::size_t x = 0; x < cols; ++x)
      out[(y + oy) * kInputSide + x + ox] = static_cast<float>(image[y * cols + x]) / 255.0f;
  return out;
}

std::vector<std::uint8_t> image_to_codes(std::span<const std::uint8_t> image, std::size_t rows, std::size_t cols) {
  if (rows > kInputSide || cols > kInputSide || image.size() != rows * cols)
    throw DomainError("image does not fit the network input");
  std::vector<std::uint8_t> out(kInputSide * kInputSide, 0);
  const std::size_t oy = (kInputSide - rows) / 2, ox = (kInputSide - cols) / 2;
  for (std::size_t y = 0; y < rows; ++y)
    for (std::size_t x = 0; x < cols; ++x) out[(y + oy) * kInputSide + x + ox] = image[y * cols + x];
  return out;
}

}  // namespace approxmul::dnn
