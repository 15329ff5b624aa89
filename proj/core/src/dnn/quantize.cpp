#include "approxmul/dnn/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "approxmul/error.hpp"

namespace approxmul::dnn {

std::int64_t round_half_away(double x) noexcept {
  return static_cast<std::int64_t>(x < 0.0 ? -std::floor(-x + 0.5) : std::floor(x + 0.5));
}

std::uint8_t QuantParams::quantize(double x) const noexcept {
  const std::int64_t q = round_half_away(x / scale) + zero_point;
  return static_cast<std::uint8_t>(std::clamp<std::int64_t>(q, 0, 255));
}

QuantParams choose_params(double min, double max, std::vector<std::string>* warnings, const std::string& name) {
  const double lo = std::min(min, 0.0);
  const double hi = std::max(max, 0.0);
  if (min == max && warnings)
    warnings->push_back("tensor " + (name.empty() ? std::string("<unnamed>") : name) +
                        " is constant; range widened to include 0");
  if (!(hi - lo >= 255.0 * kScaleFloor)) {
    if (warnings)
      warnings->push_back("tensor " + (name.empty() ? std::string("<unnamed>") : name) +
                          " has a degenerate range; scale floor applied");
    return {kScaleFloor, 0};
  }
  QuantParams p;
  p.scale = (hi - lo) / 255.0;
  p.zero_point = static_cast<std::uint8_t>(std::clamp<std::int64_t>(round_half_away(-lo / p.scale), 0, 255));
  return p;
}

QuantParams calibrate_tensor(std::span<const float> values, std::vector<std::string>* warnings,
                             const std::string& name) {
  if (values.empty()) throw DomainError("calibrate: empty tensor " + name);
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  return choose_params(*mn, *mx, warnings, name);
}

std::size_t QuantizedTensor::element_count() const noexcept {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

void QuantizedTensor::validate() const {
  if (codes.size() != element_count())
    throw DomainError("quantized tensor has " + std::to_string(codes.size()) + " codes for shape of " +
                      std::to_string(element_count()));
  if (!(params.scale > 0.0) || !std::isfinite(params.scale)) throw DomainError("quantized tensor scale must be > 0");
}

QuantizedTensor quantize_tensor(std::span<const float> values, std::vector<std::size_t> shape,
                                const QuantParams& params) {
  QuantizedTensor t{std::move(shape), {}, params};
  t.codes.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) t.codes[i] = params.quantize(values[i]);
  t.validate();
  return t;
}

std::vector<float> dequantize_tensor(const QuantizedTensor& t) {
  std::vector<float> out(t.codes.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(t.params.dequantize(t.codes[i]));
  return out;
}

std::uint8_t requantize(std::int64_t acc, double multiplier, std::uint8_t zero_point) noexcept {
  const std::int64_t q = round_half_away(static_cast<double>(acc) * multiplier) + zero_point;
  return static_cast<std::uint8_t>(std::clamp<std::int64_t>(q, 0, 255));
}

}  // namespace approxmul::dnn
