#include <gtest/gtest.h>

#include <sstream>

#include "approxmul/aggregate.hpp"
#include "approxmul/error.hpp"
#include "oracle_values.hpp"

using namespace approxmul;

namespace {

std::uint64_t fnv1a(const std::vector<std::uint32_t>& values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto v : values)
    for (int k = 0; k < 4; ++k) {
      h ^= (v >> (8 * k)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  return h;
}

}  // namespace

TEST(IndexMap, DefaultIsRowMajor) {
  const auto m = default_index_map();
  EXPECT_EQ(m[2][0], Segment::Low);
  EXPECT_EQ(m[2][1], Segment::High);
  EXPECT_EQ(m[6][0], Segment::High);
  EXPECT_EQ(m[6][1], Segment::Low);
  EXPECT_EQ(m[8][0], Segment::High);
  EXPECT_EQ(m[8][1], Segment::High);
  EXPECT_NE(describe_index_map(m).find("M2=(Alow,Bhigh)"), std::string::npos);
}

TEST(SegmentSplit, StandardAndValidation) {
  const auto s = SegmentSplit::standard();
  EXPECT_EQ(s.range_a(Segment::High).offset, 6u);
  EXPECT_EQ(s.range_a(Segment::High).width, 2u);
  EXPECT_NO_THROW(s.validate());
  EXPECT_THROW(SegmentSplit::from_widths({3, 3, 3}).validate(), DomainError);
  EXPECT_THROW(SegmentSplit::from_widths({4, 2, 2}).validate(), DomainError);
  EXPECT_NO_THROW(SegmentSplit::from_widths({2, 3, 3}).validate());
}

TEST(AggregationPlan, ExactPlanIsExactEverywhere) {
  const auto plan = exact_plan();
  for (std::uint32_t a = 0; a < 256; ++a)
    for (std::uint32_t b = 0; b < 256; ++b) ASSERT_EQ(plan(a, b), a * b) << a << "x" << b;
}

TEST(AggregationPlan, ExactUnderEveryOrdering) {
  for (auto w : {std::array<unsigned, 3>{3, 3, 2}, {3, 2, 3}, {2, 3, 3}}) {
    PlanOptions o;
    o.split = SegmentSplit::from_widths(w);
    const auto plan = exact_plan(o);
    for (std::uint32_t a = 0; a < 256; a += 3)
      for (std::uint32_t b = 0; b < 256; b += 5) ASSERT_EQ(plan(a, b), a * b);
  }
}

TEST(AggregationPlan, HighHighIsExact2x2WithShift12) {
  const auto plan = build_plan(1);
  const auto& m8 = plan.product(8);
  EXPECT_EQ(m8.model_name, "exact2");
  EXPECT_EQ(m8.shift, 12u);
  EXPECT_EQ(plan.product(2).shift, 6u);
  EXPECT_EQ(plan.product(0).model_name, "mul3x3_1");
  EXPECT_EQ(plan.low_low_id(), 0u);
}

TEST(AggregationPlan, HandWorkedProduct) {
  // 255 = 11_111_111: every 3x3 product is 7x7 (29 each for mul3x3_1), 3x7 products are exact (21).
  // low*low 29<<0, low*mid 29<<3 twice, mid*mid 29<<6, low*high 21<<6 twice,
  // mid*high 21<<9 twice, high*high 9<<12.
  const std::uint32_t expect = 29 + 2 * (29 << 3) + (29 << 6) + 2 * (21 << 6) + 2 * (21 << 9) + (9 << 12);
  EXPECT_EQ(aggregate_mul(build_plan(1), 255, 255), expect);
  EXPECT_EQ(255u * 255u - expect, 1620u);
}

TEST(AggregationPlan, VariantsAgainstOracle) {
  const oracle::Metrics* expected[] = {&oracle::kMul881, &oracle::kMul882, &oracle::kMul883};
  for (int v = 1; v <= 3; ++v) {
    const auto lut = Lut16::from_plan(build_plan(v));
    EXPECT_EQ(fnv1a(lut.entries()), expected[v - 1]->lut_fnv1a) << "variant " << v;
  }
}

TEST(Prune, Variant3IsVariant2WithoutM2) {
  const auto v3 = build_plan(3);
  EXPECT_EQ(v3.name(), "mul8x8_3");
  EXPECT_EQ(v3.variant(), 3);
  EXPECT_EQ(v3.pruned_mask(), 1u << 2);
  EXPECT_EQ(v3.active_count(), 8u);
  const auto again = prune(build_plan(2), 2);
  for (std::uint32_t a = 0; a < 256; a += 7)
    for (std::uint32_t b = 0; b < 256; ++b) ASSERT_EQ(again(a, b), v3(a, b));
}

TEST(Prune, IdempotentAndRefusesLowLow) {
  const auto once = prune(build_plan(2), 5);
  const auto twice = prune(once, 5);
  EXPECT_EQ(once.pruned_mask(), twice.pruned_mask());
  EXPECT_EQ(once.variant(), AggregationPlan::kCustomVariant);
  EXPECT_THROW(prune(build_plan(2), 0), DomainError);
  EXPECT_THROW(prune(build_plan(2), 9), DomainError);
}

TEST(Prune, NeverIncreasesProduct) {
  const auto v2 = build_plan(2);
  for (unsigned id = 1; id < kNumProducts; ++id) {
    const auto p = prune(v2, id);
    for (std::uint32_t a = 0; a < 256; a += 3)
      for (std::uint32_t b = 0; b < 256; b += 3) ASSERT_LE(p(a, b), v2(a, b));
  }
}

TEST(Prune, HighSegmentZeroMakesM2Irrelevant) {
  const auto v2 = build_plan(2), v3 = build_plan(3);
  for (std::uint32_t a = 0; a < 256; ++a)
    for (std::uint32_t b = 0; b < 64; ++b) ASSERT_EQ(v2(a, b), v3(a, b));
}

TEST(BuildPlan, RejectsUnknownVariant) {
  EXPECT_THROW(build_plan(0), DomainError);
  EXPECT_THROW(build_plan(4), DomainError);
}

TEST(AsModel, WidthsAndRange) {
  const auto m = as_model(build_plan(2));
  EXPECT_EQ(m.width_a(), 8u);
  EXPECT_EQ(m.out_width(), 17u);
  EXPECT_THROW(m(256, 0), DomainError);
}

TEST(Lut16, ExactTable) {
  const auto e = Lut16::exact();
  EXPECT_TRUE(e.is_exact());
  EXPECT_EQ(e(255, 255), 65025u);
  EXPECT_EQ(e(17, 3), 51u);
  EXPECT_FALSE(Lut16::from_plan(build_plan(1)).is_exact());
  EXPECT_TRUE(Lut16::from_plan(exact_plan()).is_exact());
}

TEST(Lut16, BinaryLayout) {
  const auto lut = Lut16::from_plan(build_plan(3));
  std::ostringstream os;
  lut.write(os);
  const std::string bytes = os.str();
  ASSERT_EQ(bytes.size(), Lut16::kHeaderBytes + 4 * Lut16::kEntries);
  EXPECT_EQ(bytes.substr(0, 6), "AMLUT1");
  EXPECT_EQ(bytes[8], 8);
  EXPECT_EQ(bytes[10], 17);
  EXPECT_EQ(bytes[11], 3);
  EXPECT_EQ(static_cast<unsigned char>(bytes[12]), 4u);
  // entry (255,255), little-endian
  const std::size_t off = Lut16::kHeaderBytes + 4 * 65535;
  const std::uint32_t v = static_cast<unsigned char>(bytes[off]) | static_cast<unsigned char>(bytes[off + 1]) << 8 |
                          static_cast<unsigned char>(bytes[off + 2]) << 16;
  EXPECT_EQ(v, lut(255, 255));
}

TEST(Lut16, ReadRejectsCorruption) {
  std::ostringstream os;
  Lut16::exact().write(os);
  std::string bytes = os.str();

  std::istringstream truncated(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(Lut16::read(truncated), FormatError);
  std::string bad = bytes;
  bad[0] = 'X';
  std::istringstream bad_magic(bad);
  EXPECT_THROW(Lut16::read(bad_magic), FormatError);
  std::istringstream trailing(bytes + "x");
  EXPECT_THROW(Lut16::read(trailing), FormatError);
  std::string wide = bytes;
  wide[Lut16::kHeaderBytes + 2] = 0x7f;  // entry 0 becomes > 17 bits
  std::istringstream too_wide(wide);
  EXPECT_THROW(Lut16::read(too_wide), FormatError);
}
