#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace approxmul::dnn {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Grayscale images with labels 0..9, row-major pixels.
struct Dataset {
  std::size_t rows = 28;
  std::size_t cols = 28;
  std::vector<std::uint8_t> pixels;
  std::vector<std::uint8_t> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t image_size() const noexcept { return rows * cols; }
  std::span<const std::uint8_t> image(std::size_t i) const {
    return {pixels.data() + i * image_size(), image_size()};
  }
  /// Copy of items [begin, end).
  Dataset slice(std::size_t begin, std::size_t end) const;
};

/// Reads an IDX image/label file pair. Files ending in `.gz` or starting with
/// the gzip magic are inflated first. Throws FormatError naming the failing
/// offset on truncation, bad magic, or count mismatch.
Dataset load_mnist(const std::filesystem::path& images, const std::filesystem::path& labels);

struct MnistSplits {
  Dataset train;
  Dataset test;
};

/// Loads `train-images-idx3-ubyte` etc. (optionally `.gz`) from `dir`.
MnistSplits load_mnist_dir(const std::filesystem::path& dir);

/// Writes uncompressed IDX files.
void write_idx(const Dataset& data, const std::filesystem::path& images, const std::filesystem::path& labels);

}  // namespace approxmul::dnn
