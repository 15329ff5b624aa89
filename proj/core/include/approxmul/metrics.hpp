#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "approxmul/aggregate.hpp"
#include "approxmul/mulcore.hpp"

namespace approxmul {

/// Error metrics of one model against the exact product, by exhaustive sweep.
///
/// The integer fields are exact; the floating fields are derived from them
/// (er = mismatch_count / pair_count, med = ed_sum / pair_count,
/// nmed = med / (2^n - 1)^2). `mred` is the mean of ED / exact over pairs with
/// a nonzero exact product; `mred_approx_denominator` is the mean of
/// ED / approx over pairs with a nonzero approximate product.
struct ErrorReport {
  std::string model;
  unsigned width = 0;
  std::uint64_t pair_count = 0;
  std::uint64_t mismatch_count = 0;
  std::uint64_t ed_sum = 0;
  std::uint64_t max_ed = 0;
  double er = 0.0;
  double med = 0.0;
  double nmed = 0.0;
  double mred = 0.0;
  double mred_approx_denominator = 0.0;
  /// ED -> count, nonzero EDs only.
  std::map<std::uint64_t, std::uint64_t> ed_histogram;

  bool operator==(const ErrorReport&) const = default;
};

std::uint64_t error_distance(std::uint64_t approx, std::uint64_t exact) noexcept;

inline constexpr unsigned kMaxSweepWidth = 12;

/// Exhaustive sweep over all 2^(2n) operand pairs. Results do not depend on
/// `threads`. Throws DomainError for non-square models or n > 12.
ErrorReport sweep(const MultiplierModel& model, unsigned threads = 1);
ErrorReport sweep(const AggregationPlan& plan, unsigned threads = 1);

/// Checks the derived floating fields against the integer counts (1e-12 relative).
bool internal_consistency(const ErrorReport& report);

struct CodeRange {
  unsigned lo;
  unsigned hi;  // inclusive
};

/// Fraction of codes inside each inclusive range. Throws DomainError on empty input.
std::vector<double> range_histogram(std::span<const std::uint8_t> codes,
                                    std::span<const CodeRange> ranges);

/// Context attached to every emitted report.
struct Provenance {
  std::string tool_version;
  std::string index_map;
  std::vector<std::string> metric_definitions;
  std::vector<std::string> notes;

  bool operator==(const Provenance&) const = default;
};

Provenance default_provenance();

struct MetricsDocument {
  Provenance provenance;
  std::vector<ErrorReport> reports;

  bool operator==(const MetricsDocument&) const = default;
};

enum class ReportFormat { Csv, Json };

std::string to_json(const MetricsDocument& doc);
MetricsDocument metrics_from_json(const std::string& text);
std::string to_csv(const MetricsDocument& doc);
MetricsDocument metrics_from_csv(const std::string& text);

std::string render(const MetricsDocument& doc, ReportFormat format);
void emit_report(const MetricsDocument& doc, ReportFormat format, const std::filesystem::path& path);

/// Published accuracy figures for the 8x8 designs, percentages as printed.
struct PublishedAccuracy {
  std::string name;
  double er_pct;
  double med;
  double nmed_pct;
  double mred_pct;
};
const std::vector<PublishedAccuracy>& published_8x8_accuracy();

/// One candidate reconstruction of the 8x8 aggregation.
struct AggregationHypothesis {
  std::string label;
  std::array<unsigned, 3> widths_low_to_high;
  std::string sub_model;
  /// Pruned segment pair, or none.
  bool pruned = false;
  Segment pruned_a = Segment::Low;
  Segment pruned_b = Segment::Low;
  ErrorReport report;
};

struct HypothesisMatch {
  std::string target;
  std::size_t best_index = 0;
  double distance = 0.0;
  /// Distance of the default-map plan for the same target.
  double default_distance = 0.0;
};

/// Every split ordering x {mul3x3_1, mul3x3_2} x {no prune, each single
/// non-low-low prune}, scored against the published figures.
struct ReconstructionReport {
  std::vector<AggregationHypothesis> hypotheses;
  std::vector<HypothesisMatch> matches;
  /// Metrics of build_plan(1..3) under the default map.
  std::vector<ErrorReport> default_variants;
};

/// Relative distance over ER, MED and MRED.
double published_distance(const ErrorReport& report, const PublishedAccuracy& target);

ReconstructionReport sweep_hypotheses(unsigned threads = 1);
std::string to_json(const ReconstructionReport& report, const Provenance& provenance);

}  // namespace approxmul
