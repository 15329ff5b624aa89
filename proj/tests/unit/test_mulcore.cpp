#include <gtest/gtest.h>

#include <sstream>

#include "approxmul/error.hpp"
#include "approxmul/mulcore.hpp"

using namespace approxmul;

TEST(Mul331, ModifiedRowsHoldTheirValues) {
  EXPECT_EQ(mul3x3_1(5, 7), 27u);
  EXPECT_EQ(mul3x3_1(7, 5), 27u);
  EXPECT_EQ(mul3x3_1(6, 6), 24u);
  EXPECT_EQ(mul3x3_1(6, 7), 30u);
  EXPECT_EQ(mul3x3_1(7, 6), 30u);
  EXPECT_EQ(mul3x3_1(7, 7), 29u);
}

TEST(Mul331, ExactBelowThirtyTwo) {
  for (std::uint32_t a = 0; a < 8; ++a)
    for (std::uint32_t b = 0; b < 8; ++b)
      if (a * b < 32) {
        EXPECT_EQ(mul3x3_1(a, b), a * b) << a << "x" << b;
      }
}

TEST(Mul331, FitsFiveBitsAndIsCommutative) {
  for (std::uint32_t a = 0; a < 8; ++a)
    for (std::uint32_t b = 0; b < 8; ++b) {
      EXPECT_LT(mul3x3_1(a, b), 32u);
      EXPECT_EQ(mul3x3_1(a, b), mul3x3_1(b, a));
    }
}

TEST(Mul332, PredictorRows) {
  EXPECT_EQ(mul3x3_2(6, 6), 40u);
  EXPECT_EQ(mul3x3_2(6, 7), 46u);
  EXPECT_EQ(mul3x3_2(7, 6), 46u);
  EXPECT_EQ(mul3x3_2(7, 7), 45u);
  EXPECT_EQ(mul3x3_2(5, 7), 27u);
  EXPECT_EQ(mul3x3_2(7, 5), 27u);
}

TEST(Mul332, AgreesWithMul331OutsidePredictor) {
  for (std::uint32_t a = 0; a < 8; ++a)
    for (std::uint32_t b = 0; b < 8; ++b) {
      EXPECT_EQ(predictor_fires(a, b), a >= 6 && b >= 6);
      if (!predictor_fires(a, b)) {
        EXPECT_EQ(mul3x3_2(a, b), mul3x3_1(a, b));
      }
    }
}

TEST(Mul332, RowNoteRecordsPrintedValue) {
  const auto& notes = mul3x3_2_row_notes();
  ASSERT_EQ(notes.size(), 1u);
  EXPECT_EQ(notes[0].a, 7u);
  EXPECT_EQ(notes[0].b, 6u);
  EXPECT_EQ(notes[0].printed_value, 38u);
  EXPECT_EQ(notes[0].resolved_value, 46u);
  EXPECT_EQ(mul3x3_2(7, 6), notes[0].resolved_value);
}

TEST(ExactMul, SmallWidths) {
  EXPECT_EQ(exact_mul2x2(3, 3), 9u);
  EXPECT_EQ(exact_mul(7, 7, 3), 49u);
  EXPECT_EQ(exact_mul(255, 255, 8), 65025u);
  EXPECT_THROW(exact_mul2x2(4, 1), DomainError);
  EXPECT_THROW(exact_mul(8, 1, 3), DomainError);
}

TEST(Expressions331, DisagreeOnlyWhereSecondBitTermMisfires) {
  // The literal O1 expression has a1 & ~a0 & b1 where b0 is needed; it adds 2
  // exactly when a = x10, b = x10.
  for (std::uint32_t a = 0; a < 8; ++a)
    for (std::uint32_t b = 0; b < 8; ++b) {
      const bool misfire = (a & 3) == 2 && (b & 3) == 2;
      EXPECT_EQ(eval_expressions_331(a, b), mul3x3_1(a, b) + (misfire ? 2u : 0u)) << a << "x" << b;
    }
}

TEST(MultiplierModel, RejectsOutOfRangeOperands) {
  const auto m = mul3x3_1_model();
  EXPECT_EQ(m(7, 7), 29u);
  EXPECT_THROW(m(8, 0), DomainError);
  EXPECT_THROW(m(0, 8), DomainError);
  EXPECT_EQ(m.out_width(), 5u);
  EXPECT_EQ(mul3x3_2_model().out_width(), 6u);
  EXPECT_EQ(exact_model(3).name(), "exact3");
}

TEST(TruthTable, EnumerationIndexing) {
  const auto t = enumerate_table(mul3x3_1_model());
  EXPECT_EQ(t.size(), 64u);
  EXPECT_EQ(t[(7u << 3) | 7u], 29u);
  EXPECT_EQ(t.at(5, 7), 27u);
  const auto e = enumerate_table(exact_model(3));
  EXPECT_EQ(e.at(7, 7), 49u);
  EXPECT_EQ(e.out_width(), 6u);
}

TEST(TruthTable, ColumnExtractsBits) {
  const auto t = enumerate_table(exact_model(2));
  const auto c0 = t.column(0);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(c0[i], (t[i] & 1u) != 0);
  EXPECT_THROW(t.column(t.out_width()), DomainError);
}

TEST(TruthTable, ConstructorValidates) {
  EXPECT_THROW(TruthTable(3, 3, 5, std::vector<std::uint32_t>(63)), DomainError);
  EXPECT_THROW(TruthTable(1, 1, 1, {0, 0, 0, 2}), DomainError);
  EXPECT_THROW(TruthTable(13, 13, 8, {}), DomainError);
}

TEST(TruthTable, TextRoundTrip) {
  for (const auto& m : {mul3x3_1_model(), mul3x3_2_model(), exact_model(3)}) {
    const auto t = enumerate_table(m);
    std::ostringstream os;
    write_truth_table(os, t);
    std::istringstream is(os.str());
    const auto back = read_truth_table(is);
    EXPECT_EQ(back, t);
    std::ostringstream again;
    write_truth_table(again, back);
    EXPECT_EQ(again.str(), os.str());
  }
}

TEST(TruthTable, ReadRejectsMalformedText) {
  std::istringstream bad_header("xx 3 3 5\n");
  EXPECT_THROW(read_truth_table(bad_header), FormatError);
  std::istringstream short_body("tt 1 1 2\n0\n0\n");
  EXPECT_THROW(read_truth_table(short_body), FormatError);
  std::istringstream wide("tt 1 1 1\n0\n0\n0\n5\n");
  EXPECT_THROW(read_truth_table(wide), Error);
}
