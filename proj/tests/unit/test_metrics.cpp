#include <gtest/gtest.h>

#include <cmath>

#include "approxmul/aggregate.hpp"
#include "approxmul/error.hpp"
#include "approxmul/metrics.hpp"
#include "oracle_values.hpp"

using namespace approxmul;

namespace {

void expect_matches(const ErrorReport& r, const oracle::Metrics& o) {
  EXPECT_EQ(r.mismatch_count, o.mismatches);
  EXPECT_EQ(r.ed_sum, o.ed_sum);
  EXPECT_EQ(r.max_ed, o.max_ed);
  EXPECT_NEAR(r.mred, o.mred, 1e-12 * o.mred);
  EXPECT_TRUE(internal_consistency(r));
}

}  // namespace

TEST(ErrorDistance, Symmetric) {
  EXPECT_EQ(error_distance(5, 9), 4u);
  EXPECT_EQ(error_distance(9, 5), 4u);
  EXPECT_EQ(error_distance(0, 0), 0u);
}

TEST(Sweep, Mul331Exact) {
  const auto r = sweep(mul3x3_1_model());
  EXPECT_EQ(r.pair_count, 64u);
  EXPECT_EQ(r.er, 6.0 / 64.0);
  EXPECT_EQ(r.med, 72.0 / 64.0);
  expect_matches(r, oracle::kMul331);
  const std::map<std::uint64_t, std::uint64_t> hist{{8, 2}, {12, 3}, {20, 1}};
  EXPECT_EQ(r.ed_histogram, hist);
}

TEST(Sweep, Mul332Exact) {
  const auto r = sweep(mul3x3_2_model());
  EXPECT_EQ(r.er, 6.0 / 64.0);
  EXPECT_EQ(r.med, 0.5);
  expect_matches(r, oracle::kMul332);
}

TEST(Sweep, VariantsAgainstOracle) {
  expect_matches(sweep(build_plan(1)), oracle::kMul881);
  expect_matches(sweep(build_plan(2)), oracle::kMul882);
  expect_matches(sweep(build_plan(3)), oracle::kMul883);
}

TEST(Sweep, ExactModelHasZeroError) {
  for (unsigned k : {2u, 3u, 5u}) {
    const auto r = sweep(exact_model(k));
    EXPECT_EQ(r.mismatch_count, 0u);
    EXPECT_EQ(r.mred, 0.0);
    EXPECT_EQ(r.nmed, 0.0);
    EXPECT_TRUE(r.ed_histogram.empty());
  }
  EXPECT_EQ(sweep(exact_plan()).ed_sum, 0u);
}

TEST(Sweep, ThreadCountDoesNotChangeResult) {
  const auto one = sweep(build_plan(2), 1);
  for (unsigned t : {2u, 3u, 7u}) EXPECT_EQ(sweep(build_plan(2), t), one);
  EXPECT_EQ(sweep(as_model(build_plan(1)), 4), sweep(build_plan(1), 1));
}

TEST(Sweep, NmedNormalization) {
  const auto r = sweep(build_plan(1));
  EXPECT_DOUBLE_EQ(r.nmed, r.med / 65025.0);
  EXPECT_EQ(r.width, 8u);
}

TEST(Sweep, ApproxDenominatorMred) {
  // Six modified rows; the approximate value is zero only when an operand is zero (15 pairs).
  const double expect = (8.0 / 27 + 8.0 / 27 + 4.0 / 40 + 4.0 / 46 + 4.0 / 46 + 4.0 / 45) / 49.0;
  EXPECT_NEAR(sweep(mul3x3_2_model()).mred_approx_denominator, expect, 1e-15);
}

TEST(InternalConsistency, DetectsTampering) {
  auto r = sweep(mul3x3_1_model());
  ASSERT_TRUE(internal_consistency(r));
  auto bad = r;
  bad.med *= 1.0 + 1e-9;
  EXPECT_FALSE(internal_consistency(bad));
  bad = r;
  bad.ed_histogram[8] += 1;
  EXPECT_FALSE(internal_consistency(bad));
  bad = r;
  bad.er = 0.1;
  EXPECT_FALSE(internal_consistency(bad));
}

TEST(RangeHistogram, Fractions) {
  const std::vector<std::uint8_t> codes{0, 10, 31, 32, 100, 200, 255, 128};
  const std::vector<CodeRange> ranges{{0, 31}, {96, 159}};
  const auto f = range_histogram(codes, ranges);
  EXPECT_DOUBLE_EQ(f[0], 3.0 / 8.0);
  EXPECT_DOUBLE_EQ(f[1], 2.0 / 8.0);
  EXPECT_THROW(range_histogram(std::vector<std::uint8_t>{}, ranges), DomainError);
}

TEST(Provenance, CarriesIndexMapAndDiscrepancies) {
  const auto p = default_provenance();
  EXPECT_EQ(p.index_map, describe_index_map(default_index_map()));
  bool row_note = false, eq_note = false;
  for (const auto& n : p.notes) {
    row_note |= n.find("38") != std::string::npos && n.find("46") != std::string::npos;
    eq_note |= n.find("(2,2)") != std::string::npos;
  }
  EXPECT_TRUE(row_note);
  EXPECT_TRUE(eq_note);
  EXPECT_GE(p.metric_definitions.size(), 5u);
}

TEST(Hypotheses, SweepCoversEveryCandidate) {
  const auto rep = sweep_hypotheses();
  EXPECT_EQ(rep.hypotheses.size(), 54u);
  ASSERT_EQ(rep.matches.size(), 3u);
  ASSERT_EQ(rep.default_variants.size(), 3u);
  for (const auto& m : rep.matches) {
    EXPECT_LE(m.distance, m.default_distance);
    EXPECT_LT(m.best_index, rep.hypotheses.size());
  }
  for (const auto& h : rep.hypotheses) EXPECT_TRUE(internal_consistency(h.report)) << h.label;
  // The default-map variants appear among the hypotheses.
  EXPECT_EQ(rep.default_variants[0].ed_sum, oracle::kMul881.ed_sum);
}

TEST(Hypotheses, PublishedDistanceZeroOnTarget) {
  const auto& t = published_8x8_accuracy().at(0);
  ErrorReport r;
  r.er = t.er_pct / 100.0;
  r.med = t.med;
  r.mred = t.mred_pct / 100.0;
  EXPECT_NEAR(published_distance(r, t), 0.0, 1e-12);
}
