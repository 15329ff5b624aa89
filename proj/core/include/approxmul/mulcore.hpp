#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace approxmul {

/// Complete output map of a wa x wb bit function.
/// Entry for operands (a, b) lives at index (a << width_b) | b.
class TruthTable {
 public:
  TruthTable(unsigned width_a, unsigned width_b, unsigned out_width,
             std::vector<std::uint32_t> entries);

  unsigned width_a() const noexcept { return width_a_; }
  unsigned width_b() const noexcept { return width_b_; }
  unsigned out_width() const noexcept { return out_width_; }
  unsigned num_inputs() const noexcept { return width_a_ + width_b_; }
  std::size_t size() const noexcept { return entries_.size(); }

  std::uint32_t at(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t operator[](std::size_t index) const noexcept { return entries_[index]; }
  const std::vector<std::uint32_t>& entries() const noexcept { return entries_; }

  /// Output bit `bit` as a single-output column over all 2^num_inputs rows.
  std::vector<bool> column(unsigned bit) const;

  bool operator==(const TruthTable&) const = default;

 private:
  unsigned width_a_;
  unsigned width_b_;
  unsigned out_width_;
  std::vector<std::uint32_t> entries_;
};

/// Text form: `tt <wa> <wb> <wout>` followed by one decimal entry per line.
void write_truth_table(std::ostream& os, const TruthTable& table);
TruthTable read_truth_table(std::istream& is);

/// An evaluable unsigned x unsigned -> unsigned function with declared widths.
class MultiplierModel {
 public:
  using Fn = std::function<std::uint32_t(std::uint32_t, std::uint32_t)>;

  MultiplierModel(std::string name, unsigned width_a, unsigned width_b, unsigned out_width,
                  Fn fn);

  const std::string& name() const noexcept { return name_; }
  unsigned width_a() const noexcept { return width_a_; }
  unsigned width_b() const noexcept { return width_b_; }
  unsigned out_width() const noexcept { return out_width_; }

  /// Checked evaluation; throws DomainError for out-of-range operands.
  std::uint32_t operator()(std::uint32_t a, std::uint32_t b) const;
  /// Caller guarantees a < 2^width_a and b < 2^width_b.
  std::uint32_t eval_unchecked(std::uint32_t a, std::uint32_t b) const { return fn_(a, b); }

 private:
  std::string name_;
  unsigned width_a_;
  unsigned width_b_;
  unsigned out_width_;
  Fn fn_;
};

// Scalar kernels. All throw DomainError on out-of-range operands.
std::uint32_t exact_mul(std::uint32_t a, std::uint32_t b, unsigned k);
std::uint32_t exact_mul2x2(std::uint32_t a, std::uint32_t b);

/// 3x3 multiplier with the six products above 31 remapped so bit 5 is never set.
std::uint32_t mul3x3_1(std::uint32_t a, std::uint32_t b);

/// mul3x3_1 plus the top-bit predictor: when a >= 6 and b >= 6 the result has
/// bit 5 set and bit 4 cleared.
std::uint32_t mul3x3_2(std::uint32_t a, std::uint32_t b);

/// Literal transcription of the published sum-of-products equations for the
/// five mul3x3_1 output bits (bit 5 is constant 0).
std::uint32_t eval_expressions_331(std::uint32_t a, std::uint32_t b);

/// True when the mul3x3_2 predictor (a2 a1 b2 b1) fires.
constexpr bool predictor_fires(std::uint32_t a, std::uint32_t b) noexcept {
  return ((a >> 1) & 3U) == 3U && ((b >> 1) & 3U) == 3U;
}

MultiplierModel exact_model(unsigned k);
MultiplierModel mul3x3_1_model();
MultiplierModel mul3x3_2_model();
MultiplierModel expressions_331_model();

/// Widths are capped at width_a + width_b <= 24.
inline constexpr unsigned kMaxEnumerationBits = 24;
TruthTable enumerate_table(const MultiplierModel& model);

/// One row where a published table value disagrees with its own output bits.
struct PublishedRowNote {
  std::uint32_t a;
  std::uint32_t b;
  std::uint32_t printed_value;
  std::uint32_t resolved_value;
  std::string text;
};

/// Known inconsistencies in the published mul3x3_2 rows, carried into reports.
const std::vector<PublishedRowNote>& mul3x3_2_row_notes();

}  // namespace approxmul
