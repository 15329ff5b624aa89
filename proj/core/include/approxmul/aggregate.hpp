#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "approxmul/mulcore.hpp"

namespace approxmul {

/// Position of an operand segment, by significance.
enum class Segment : std::uint8_t { Low = 0, Mid = 1, High = 2 };

std::string_view segment_name(Segment s) noexcept;

struct SegmentRange {
  unsigned offset;
  unsigned width;
};

/// Three-way split of both 8-bit operands. Each segment is 2 or 3 bits wide.
struct SegmentSplit {
  std::array<SegmentRange, 3> a;  // indexed by Segment
  std::array<SegmentRange, 3> b;

  /// A[7:6]/A[5:3]/A[2:0], same for B.
  static SegmentSplit standard();
  /// Same split on both operands from segment widths listed low to high.
  static SegmentSplit from_widths(std::array<unsigned, 3> low_to_high);

  const SegmentRange& range_a(Segment s) const { return a[static_cast<int>(s)]; }
  const SegmentRange& range_b(Segment s) const { return b[static_cast<int>(s)]; }

  /// Throws DomainError unless both operands are covered exactly by disjoint segments.
  void validate() const;
  std::string widths_label() const;
};

/// Sub-multiplier id (0..8) to (segment of A, segment of B).
using IndexMap = std::array<std::array<Segment, 2>, 9>;

/// M0=(Alow,Blow) M1=(Alow,Bmid) M2=(Alow,Bhigh) M3=(Amid,Blow) ... M8=(Ahigh,Bhigh).
IndexMap default_index_map();
std::string describe_index_map(const IndexMap& map);

inline constexpr unsigned kNumProducts = 9;

/// One partial product: a sub-multiplier fed two zero-extended segments.
struct PartialProduct {
  unsigned id = 0;
  Segment seg_a = Segment::Low;
  Segment seg_b = Segment::Low;
  std::string model_name;
  unsigned shift = 0;
  /// Sub-multiplier output indexed by (x << 3) | y, operands zero-extended to 3 bits.
  std::array<std::uint8_t, 64> table{};
};

struct PlanOptions {
  SegmentSplit split = SegmentSplit::standard();
  IndexMap index_map = default_index_map();
};

/// Composition of an 8x8 multiplier from nine 3x3/2x2 sub-multipliers.
class AggregationPlan {
 public:
  static constexpr std::uint8_t kExactVariant = 0;
  static constexpr std::uint8_t kCustomVariant = 255;

  /// `sub_model` serves every product that is not a 2-bit x 2-bit pair; those
  /// use the exact 2x2 multiplier.
  AggregationPlan(std::string name, std::uint8_t variant, const MultiplierModel& sub_model,
                  const PlanOptions& options = {});

  const std::string& name() const noexcept { return name_; }
  std::uint8_t variant() const noexcept { return variant_; }
  const SegmentSplit& split() const noexcept { return split_; }
  const IndexMap& index_map() const noexcept { return index_map_; }
  const std::array<PartialProduct, kNumProducts>& products() const noexcept { return products_; }
  const PartialProduct& product(unsigned id) const { return products_.at(id); }

  std::uint16_t pruned_mask() const noexcept { return pruned_; }
  bool is_pruned(unsigned id) const noexcept { return (pruned_ >> id) & 1U; }
  unsigned active_count() const noexcept;

  /// Id of the product fed by both least-significant segments.
  unsigned low_low_id() const;

  std::uint32_t operator()(std::uint32_t a, std::uint32_t b) const noexcept;

 private:
  friend AggregationPlan prune(const AggregationPlan& plan, unsigned id);

  std::string name_;
  std::uint8_t variant_;
  SegmentSplit split_;
  IndexMap index_map_;
  std::array<PartialProduct, kNumProducts> products_;
  std::uint16_t pruned_ = 0;
};

/// Variant 1: mul3x3_1 sub-multipliers. Variant 2: mul3x3_2. Variant 3: variant
/// 2 with M2 removed. Throws DomainError for any other variant.
AggregationPlan build_plan(int variant, const PlanOptions& options = {});

/// Every sub-multiplier exact; reproduces a*b.
AggregationPlan exact_plan(const PlanOptions& options = {});

/// Returns `plan` with product `id` removed. Removing the low x low product is refused.
AggregationPlan prune(const AggregationPlan& plan, unsigned id);

std::uint32_t aggregate_mul(const AggregationPlan& plan, std::uint32_t a, std::uint32_t b);

/// 8x8 -> 17-bit model view of a plan.
MultiplierModel as_model(const AggregationPlan& plan);

/// One line per product: `M<id> <segA> <segB> <model> <shift> <pruned>`.
std::string describe_plan(const AggregationPlan& plan);

/// 65536-entry product table for 8-bit code pairs, indexed (a << 8) | b.
///
/// Binary layout (little-endian): 8-byte magic `AMLUT1\0\0`, width_a (u8),
/// width_b (u8), out_width (u8), variant (u8), pruned mask (u16), 2 reserved
/// zero bytes, then 65536 u32 entries.
class Lut16 {
 public:
  static constexpr std::size_t kEntries = 65536;
  static constexpr std::size_t kHeaderBytes = 16;
  static constexpr unsigned kOutWidth = 17;

  Lut16(std::vector<std::uint32_t> entries, std::uint8_t variant, std::uint16_t pruned_mask = 0);

  static Lut16 exact();
  static Lut16 from_plan(const AggregationPlan& plan);

  std::uint32_t operator()(std::uint8_t a, std::uint8_t b) const noexcept {
    return entries_[(static_cast<std::size_t>(a) << 8) | b];
  }
  const std::vector<std::uint32_t>& entries() const noexcept { return entries_; }
  std::uint8_t variant() const noexcept { return variant_; }
  std::uint16_t pruned_mask() const noexcept { return pruned_; }
  bool is_exact() const noexcept;

  void write(std::ostream& os) const;
  static Lut16 read(std::istream& is);
  void save(const std::filesystem::path& path) const;
  static Lut16 load(const std::filesystem::path& path);

  bool operator==(const Lut16&) const = default;

 private:
  std::vector<std::uint32_t> entries_;
  std::uint8_t variant_;
  std::uint16_t pruned_;
};

void export_lut16(const AggregationPlan& plan, const std::filesystem::path& path);

}  // namespace approxmul
