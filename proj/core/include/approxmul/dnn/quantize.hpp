#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace approxmul::dnn {

/// Affine unsigned 8-bit quantization: real = scale * (code - zero_point).
struct QuantParams {
  double scale = 1.0;
  std::uint8_t zero_point = 0;

  std::uint8_t quantize(double x) const noexcept;
  double dequantize(std::uint8_t code) const noexcept {
    return scale * (static_cast<int>(code) - static_cast<int>(zero_point));
  }
  bool operator==(const QuantParams&) const = default;
};

inline constexpr double kScaleFloor = 1e-8;

std::int64_t round_half_away(double x) noexcept;

/// Min/max affine parameters. The range is widened to contain 0 so real 0 is
/// an exact code. A degenerate range gets kScaleFloor and a warning.
QuantParams choose_params(double min, double max, std::vector<std::string>* warnings = nullptr,
                          const std::string& tensor_name = {});
QuantParams calibrate_tensor(std::span<const float> values, std::vector<std::string>* warnings = nullptr,
                             const std::string& tensor_name = {});

struct QuantizedTensor {
  std::vector<std::size_t> shape;
  std::vector<std::uint8_t> codes;
  QuantParams params;

  std::size_t element_count() const noexcept;
  /// Throws DomainError if codes.size() differs from the shape product or params are invalid.
  void validate() const;
};

QuantizedTensor quantize_tensor(std::span<const float> values, std::vector<std::size_t> shape,
                                const QuantParams& params);
std::vector<float> dequantize_tensor(const QuantizedTensor& t);

/// Scales a wide accumulator back to a code: round-half-away, add zero point, clamp.
std::uint8_t requantize(std::int64_t acc, double multiplier, std::uint8_t zero_point) noexcept;

}  // namespace approxmul::dnn
