#include "approxmul/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "approxmul/error.hpp"

namespace approxmul {
namespace {

struct RowStats {
  std::uint64_t mismatches = 0;
  std::uint64_t ed_sum = 0;
  std::uint64_t max_ed = 0;
  double rel_sum = 0.0;
  std::uint64_t rel_count = 0;
  double rel_approx_sum = 0.0;
  std::uint64_t rel_approx_count = 0;
  std::map<std::uint64_t, std::uint64_t> hist;
};

template <typename Eval>
ErrorReport sweep_impl(const std::string& name, unsigned n, unsigned threads, const Eval& eval) {
  if (n == 0 || n > kMaxSweepWidth)
    throw DomainError("sweep: operand width " + std::to_string(n) + " exceeds cap of " +
                      std::to_string(kMaxSweepWidth));
  const std::uint32_t side = 1U << n;
  std::vector<RowStats> rows(side);

  auto run_rows = [&](std::uint32_t begin, std::uint32_t end) {
    for (std::uint32_t a = begin; a < end; ++a) {
      RowStats& r = rows[a];
      for (std::uint32_t b = 0; b < side; ++b) {
        const std::uint64_t exact = std::uint64_t{a} * b;
        const std::uint64_t approx = eval(a, b);
        const std::uint64_t ed = error_distance(approx, exact);
        if (ed) {
          ++r.mismatches;
          r.ed_sum += ed;
          r.max_ed = std::max(r.max_ed, ed);
          ++r.hist[ed];
        }
        if (exact) {
          r.rel_sum += static_cast<double>(ed) / static_cast<double>(exact);
          ++r.rel_count;
        }
        if (approx) {
          r.rel_approx_sum += static_cast<double>(ed) / static_cast<double>(approx);
          ++r.rel_approx_count;
        }
      }
    }
  };

  threads = std::clamp(threads, 1U, side);
  if (threads == 1) {
    run_rows(0, side);
  } else {
    std::vector<std::jthread> workers;
    const std::uint32_t chunk = (side + threads - 1) / threads;
    for (std::uint32_t begin = 0; begin < side; begin += chunk)
      workers.emplace_back(run_rows, begin, std::min(side, begin + chunk));
  }

  // Rows are merged in operand order so the floating sums are partition independent.
  ErrorReport rep;
  rep.model = name;
  rep.width = n;
  rep.pair_count = std::uint64_t{side} * side;
  double rel_sum = 0.0, rel_approx_sum = 0.0;
  std::uint64_t rel_count = 0, rel_approx_count = 0;
  for (const auto& r : rows) {
    rep.mismatch_count += r.mismatches;
    rep.ed_sum += r.ed_sum;
    rep.max_ed = std::max(rep.max_ed, r.max_ed);
    for (const auto& [ed, c] : r.hist) rep.ed_histogram[ed] += c;
    rel_sum += r.rel_sum;
    rel_count += r.rel_count;
    rel_approx_sum += r.rel_approx_sum;
    rel_approx_count += r.rel_approx_count;
  }
  const double pairs = static_cast<double>(rep.pair_count);
  const double max_exact = static_cast<double>(side - 1) * static_cast<double>(side - 1);
  rep.er = static_cast<double>(rep.mismatch_count) / pairs;
  rep.med = static_cast<double>(rep.ed_sum) / pairs;
  rep.nmed = rep.med / max_exact;
  rep.mred = rel_count ? rel_sum / static_cast<double>(rel_count) : 0.0;
  rep.mred_approx_denominator =
      rel_approx_count ? rel_approx_sum / static_cast<double>(rel_approx_count) : 0.0;
  return rep;
}

bool close_rel(double x, double y) {
  const double scale = std::max({std::abs(x), std::abs(y), 1e-300});
  return std::abs(x - y) <= 1e-12 * scale;
}

}  // namespace

std::uint64_t error_distance(std::uint64_t approx, std::uint64_t exact) noexcept {
  return approx > exact ? approx - exact : exact - approx;
}

ErrorReport sweep(const MultiplierModel& model, unsigned threads) {
  if (model.width_a() != model.width_b())
    throw DomainError("sweep: model " + model.name() + " is not square");
  return sweep_impl(model.name(), model.width_a(), threads,
                    [&](std::uint32_t a, std::uint32_t b) { return model.eval_unchecked(a, b); });
}

ErrorReport sweep(const AggregationPlan& plan, unsigned threads) {
  return sweep_impl(plan.name(), 8, threads,
                    [&](std::uint32_t a, std::uint32_t b) { return plan(a, b); });
}

bool internal_consistency(const ErrorReport& r) {
  if (r.width == 0 || r.width > 31) return false;
  const double side_max = std::ldexp(1.0, static_cast<int>(r.width)) - 1.0;
  const double pairs = std::ldexp(1.0, static_cast<int>(2 * r.width));
  if (static_cast<double>(r.pair_count) != pairs) return false;
  if (r.med == 0.0 && r.nmed != 0.0) return false;
  if (!close_rel(r.nmed, r.med / (side_max * side_max))) return false;
  if (!close_rel(r.er, static_cast<double>(r.mismatch_count) / pairs)) return false;
  if (!close_rel(r.med, static_cast<double>(r.ed_sum) / pairs)) return false;
  if (r.er < 0.0 || r.er > 1.0 || r.med < 0.0) return false;

  std::uint64_t hist_count = 0, hist_sum = 0;
  for (const auto& [ed, c] : r.ed_histogram) {
    if (ed == 0) return false;
    hist_count += c;
    hist_sum += ed * c;
  }
  return hist_count == r.mismatch_count && hist_sum == r.ed_sum;
}

std::vector<double> range_histogram(std::span<const std::uint8_t> codes,
                                    std::span<const CodeRange> ranges) {
  if (codes.empty()) throw DomainError("range_histogram: empty input");
  for (const auto& r : ranges)
    if (r.lo > r.hi || r.hi > 255) throw DomainError("range_histogram: range outside [0,255]");
  std::array<std::uint64_t, 256> counts{};
  for (auto c : codes) ++counts[c];
  std::vector<double> out;
  out.reserve(ranges.size());
  for (const auto& r : ranges) {
    std::uint64_t n = 0;
    for (unsigned v = r.lo; v <= r.hi; ++v) n += counts[v];
    out.push_back(static_cast<double>(n) / static_cast<double>(codes.size()));
  }
  return out;
}

const std::vector<PublishedAccuracy>& published_8x8_accuracy() {
  static const std::vector<PublishedAccuracy> rows{
      {"mul8x8_1", 22.8, 137.04, 0.21, 1.50},
      {"mul8x8_2", 20.49, 114.83, 0.18, 1.42},
      {"mul8x8_3", 31.41, 648.20, 1.00, 2.53},
  };
  return rows;
}

double published_distance(const ErrorReport& r, const PublishedAccuracy& t) {
  const double der = (100.0 * r.er - t.er_pct) / t.er_pct;
  const double dmed = (r.med - t.med) / t.med;
  const double dmred = (100.0 * r.mred - t.mred_pct) / t.mred_pct;
  return std::sqrt(der * der + dmed * dmed + dmred * dmred);
}

ReconstructionReport sweep_hypotheses(unsigned threads) {
  ReconstructionReport out;
  const std::array<std::array<unsigned, 3>, 3> orderings{{{3, 3, 2}, {3, 2, 3}, {2, 3, 3}}};
  const std::array<MultiplierModel, 2> subs{mul3x3_1_model(), mul3x3_2_model()};

  for (const auto& widths : orderings) {
    PlanOptions opts;
    opts.split = SegmentSplit::from_widths(widths);
    for (const auto& sub : subs) {
      const AggregationPlan base("agg", AggregationPlan::kCustomVariant, sub, opts);
      const std::string prefix = opts.split.widths_label() + " " + sub.name();
      {
        AggregationHypothesis h{prefix + " full", widths, sub.name(), false, Segment::Low,
                                Segment::Low, sweep(base, threads)};
        h.report.model = h.label;
        out.hypotheses.push_back(std::move(h));
      }
      for (unsigned id = 0; id < kNumProducts; ++id) {
        if (id == base.low_low_id()) continue;
        const auto& p = base.product(id);
        AggregationHypothesis h;
        h.label = prefix + " drop (A" + std::string(segment_name(p.seg_a)) + ",B" +
                  std::string(segment_name(p.seg_b)) + ")";
        h.widths_low_to_high = widths;
        h.sub_model = sub.name();
        h.pruned = true;
        h.pruned_a = p.seg_a;
        h.pruned_b = p.seg_b;
        h.report = sweep(prune(base, id), threads);
        h.report.model = h.label;
        out.hypotheses.push_back(std::move(h));
      }
    }
  }

  for (int v = 1; v <= 3; ++v) out.default_variants.push_back(sweep(build_plan(v), threads));

  const auto& published = published_8x8_accuracy();
  for (std::size_t t = 0; t < published.size(); ++t) {
    HypothesisMatch m;
    m.target = published[t].name;
    m.distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.hypotheses.size(); ++i) {
      const double d = published_distance(out.hypotheses[i].report, published[t]);
      if (d < m.distance) {
        m.distance = d;
        m.best_index = i;
      }
    }
    m.default_distance = published_distance(out.default_variants[t], published[t]);
    out.matches.push_back(m);
  }
  return out;
}

}  // namespace approxmul
