#pragma once

#include <random>

#include "approxmul/dnn/mnist.hpp"

// Ten separable 28x28 classes: class c lights a horizontal bar at row 2c+4 and
// a vertical bar at column 27-2c, with pixel noise.
inline approxmul::dnn::Dataset synthetic_digits(std::size_t count, std::uint64_t seed) {
  approxmul::dnn::Dataset d;
  d.pixels.assign(count * 28 * 28, 0);
  d.labels.resize(count);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> noise(0, 40), jitter(-1, 1);
  for (std::size_t n = 0; n < count; ++n) {
    const int c = static_cast<int>(n % 10);
    d.labels[n] = static_cast<std::uint8_t>(c);
    auto* img = d.pixels.data() + n * 28 * 28;
    for (int i = 0; i < 28 * 28; ++i) img[i] = static_cast<std::uint8_t>(noise(rng));
    const int row = 2 * c + 4 + jitter(rng), col = 27 - 2 * c - 4 + jitter(rng);
    for (int x = 3; x < 25; ++x) img[row * 28 + x] = 230;
    for (int y = 3; y < 25; ++y) img[y * 28 + col] = 200;
  }
  return d;
}
