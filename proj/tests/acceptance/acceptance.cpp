// Acceptance suite: one PASS/FAIL line per criterion.
//
// A criterion listed with --known-deviation still prints FAIL; the process
// exits 0 only if every other criterion passes and each listed one fails in
// the documented way.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "approxmul/aggregate.hpp"
#include "approxmul/dnn/checkpoint.hpp"
#include "approxmul/dnn/inference.hpp"
#include "approxmul/dnn/training.hpp"
#include "approxmul/error.hpp"
#include "approxmul/logicsynth.hpp"
#include "approxmul/metrics.hpp"
#include "approxmul/mulcore.hpp"
#include "json.hpp"

using namespace approxmul;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
  // Machine-checkable signature of a documented failure.
  std::string signature;
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  os << s;
}

// --- arithmetic criteria --------------------------------------------------

Outcome c1_exact_match() {
  const auto r1 = sweep(mul3x3_1_model());
  const auto r2 = sweep(mul3x3_2_model());
  Outcome o;
  o.pass = r1.pair_count == 64 && r1.mismatch_count == 6 && r1.ed_sum == 72 && r1.er == 0.09375 &&
           r1.med == 1.125 && r2.mismatch_count == 6 && r2.ed_sum == 32 && r2.er == 0.09375 && r2.med == 0.5;
  o.summary = fmt("mul3x3_1 ER %llu/64 MED %llu/64; mul3x3_2 ER %llu/64 MED %llu/64",
                  (unsigned long long)r1.mismatch_count, (unsigned long long)r1.ed_sum,
                  (unsigned long long)r2.mismatch_count, (unsigned long long)r2.ed_sum);
  return o;
}

struct PrintedRow {
  unsigned a, b, bits, value, ed;
};

Outcome c2_row_oracle() {
  // Rows as printed: operands, output bits O5..O0, Value', ED.
  const PrintedRow t2[] = {{5, 7, 0b011011, 27, 8},  {6, 6, 0b011000, 24, 12}, {6, 7, 0b011110, 30, 12},
                           {7, 5, 0b011011, 27, 8},  {7, 6, 0b011110, 30, 12}, {7, 7, 0b011101, 29, 20}};
  const PrintedRow t3[] = {{5, 7, 0b011011, 27, 8}, {6, 6, 0b101000, 40, 4}, {6, 7, 0b101110, 46, 4},
                           {7, 5, 0b011011, 27, 8}, {7, 6, 0b101110, 38, 4}, {7, 7, 0b101101, 45, 4}};
  Outcome o;
  o.pass = true;
  auto check = [&](const PrintedRow& r, std::uint32_t (*fn)(std::uint32_t, std::uint32_t), const char* name) {
    const std::uint32_t v = fn(r.a, r.b);
    const std::uint32_t ed = r.a * r.b > v ? r.a * r.b - v : v - r.a * r.b;
    if (v != r.bits || ed != r.ed) {
      o.pass = false;
      o.details.push_back(fmt("%s(%u,%u) = %u ED %u, printed bits give %u ED %u", name, r.a, r.b, v, ed, r.bits, r.ed));
    }
    if (r.value != r.bits) o.details.push_back(fmt("%s(%u,%u): printed value %u differs from its bits %u", name, r.a, r.b, r.value, r.bits));
    else if (v != r.value) o.pass = false;
  };
  for (const auto& r : t2) check(r, mul3x3_1, "mul3x3_1");
  for (const auto& r : t3) check(r, mul3x3_2, "mul3x3_2");

  // The disagreement must be flagged in a generated report.
  const std::string report = to_json(MetricsDocument{default_provenance(), {sweep(mul3x3_2_model())}});
  const bool flagged = report.find("38") != std::string::npos && report.find("101110 (46)") != std::string::npos;
  if (!flagged) {
    o.pass = false;
    o.details.push_back("metrics report does not flag the (111,110) row");
  }
  o.summary = o.pass ? "12 rows reproduced; (111,110) resolved to 46 and flagged in the metrics report"
                     : "row mismatch";
  return o;
}

Outcome c3_expressions() {
  Outcome o;
  std::vector<std::string> cex;
  for (std::uint32_t a = 0; a < 8; ++a)
    for (std::uint32_t b = 0; b < 8; ++b)
      if (eval_expressions_331(a, b) != mul3x3_1(a, b)) {
        cex.push_back(fmt("(%u,%u)", a, b));
        o.details.push_back(fmt("counterexample a=%u%u%u b=%u%u%u: expressions give %u, table gives %u", a >> 2, (a >> 1) & 1,
                                a & 1, b >> 2, (b >> 1) & 1, b & 1, eval_expressions_331(a, b), mul3x3_1(a, b)));
      }
  o.pass = cex.empty();
  for (const auto& c : cex) o.signature += c;
  o.summary = o.pass ? "64/64 inputs agree" : fmt("%zu/64 inputs disagree", cex.size());
  if (!o.pass)
    o.details.push_back("all mismatches are in O1: its term a1*~a0*b1 behaves as a1*~a0*b0 in the table");
  return o;
}

Outcome c4_exact_identity() {
  const auto plan = exact_plan();
  std::size_t bad = 0;
  for (std::uint32_t a = 0; a < 256; ++a)
    for (std::uint32_t b = 0; b < 256; ++b) bad += plan(a, b) != a * b;
  return {bad == 0, fmt("%zu/65536 pairs differ from a*b", bad), {}, {}};
}

Outcome c5_consistency() {
  Outcome o;
  o.pass = true;
  for (int v = 1; v <= 3; ++v) {
    const auto r = sweep(build_plan(v));
    const double nmed = r.med / 65025.0, er = static_cast<double>(r.mismatch_count) / 65536.0;
    const bool ok = std::abs(r.nmed - nmed) <= 1e-12 * nmed && std::abs(r.er - er) <= 1e-12 * er &&
                    internal_consistency(r);
    if (!ok) {
      o.pass = false;
      o.details.push_back(fmt("variant %d inconsistent", v));
    }
  }
  const auto v2 = build_plan(2), v3 = build_plan(3);
  std::size_t violations = 0;
  for (std::uint32_t a = 0; a < 256; ++a)
    for (std::uint32_t b = 0; b < 256; ++b) violations += v3(a, b) > v2(a, b);
  if (violations) o.pass = false;
  o.summary = fmt("NMED/ER identities hold for 3 variants: %s; variant 3 > variant 2 on %zu pairs",
                  o.pass || violations ? "yes" : "no", violations);
  return o;
}

Outcome c6_table4(const fs::path& work) {
  Outcome o;
  const auto& pub = published_8x8_accuracy();
  std::vector<ErrorReport> d;
  for (int v = 1; v <= 3; ++v) d.push_back(sweep(build_plan(v)));
  bool direct = true;
  for (int v = 0; v < 3; ++v) {
    const double der = 100.0 * d[v].er - pub[v].er_pct, dmed = d[v].med - pub[v].med;
    o.details.push_back(fmt("%s: ER %.3f%% (|delta| %.3f pp), MED %.3f (|delta| %.2f, %.1f%%), MRED %.3f%% vs %.2f%%",
                            pub[v].name.c_str(), 100.0 * d[v].er, std::abs(der), d[v].med, std::abs(dmed),
                            100.0 * std::abs(dmed) / pub[v].med, 100.0 * d[v].mred, pub[v].mred_pct));
    if (v < 2 && (std::abs(der) > 3.0 || std::abs(dmed) > 0.25 * pub[v].med)) direct = false;
  }

  // Fallback branch: the discrepancy report enumerating every hypothesis.
  const auto path = work / "reconstruction.json";
  spit(path, to_json(sweep_hypotheses(), default_provenance()));
  bool report_ok = false;
  try {
    const auto j = nlohmann::json::parse(slurp(path));
    const auto& hyps = j.at("hypotheses");
    bool vectors = hyps.size() == 54;
    std::set<std::string> labels;
    for (const auto& h : hyps) {
      labels.insert(h.at("label").get<std::string>());
      for (const char* k : {"er_pct", "med", "nmed_pct", "mred_pct"}) vectors = vectors && h.contains(k);
    }
    bool matches = j.at("closest_matches").size() == 3;
    for (const auto& m : j.at("closest_matches")) {
      matches = matches && labels.count(m.at("closest").get<std::string>());
      o.details.push_back("closest to " + m.at("target").get<std::string>() + ": " +
                          m.at("closest").get<std::string>() + fmt(" (distance %.3f, default map %.3f)",
                                                                   m.at("distance").get<double>(),
                                                                   m.at("default_map_distance").get<double>()));
    }
    report_ok = vectors && matches && labels.size() == 54;
  } catch (const std::exception& e) {
    o.details.push_back(std::string("reconstruction report unreadable: ") + e.what());
  }
  o.pass = direct || report_ok;
  o.summary = direct ? "default map within 3 pp ER and 25% MED for variants 1 and 2"
                     : std::string("default map outside tolerance; ") +
                           (report_ok ? "discrepancy report with 54 hypotheses written to " + path.string()
                                      : "discrepancy report incomplete");
  return o;
}

Outcome c10_logic_cost() {
  const auto approx = cost_estimate(minimize_all(enumerate_table(mul3x3_1_model())));
  const auto exact = cost_estimate(minimize_all(enumerate_table(exact_model(3))));
  return {approx.literal_count < exact.literal_count,
          fmt("mul3x3_1 %u literals (%u cubes) vs exact 3x3 %u literals (%u cubes), %.2f%% fewer", approx.literal_count,
              approx.cube_count, exact.literal_count, exact.cube_count,
              100.0 * (exact.literal_count - static_cast<double>(approx.literal_count)) / exact.literal_count),
          {},
          {}};
}

Outcome c11_round_trips(const fs::path& work, const dnn::Checkpoint* trained) {
  Outcome o;
  o.pass = true;
  auto fail = [&](const std::string& what) {
    o.pass = false;
    o.details.push_back(what + " does not round-trip");
  };
  for (const auto& m : {mul3x3_1_model(), mul3x3_2_model(), exact_model(3)}) {
    std::ostringstream a, b;
    write_truth_table(a, enumerate_table(m));
    std::istringstream in(a.str());
    write_truth_table(b, read_truth_table(in));
    if (a.str() != b.str()) fail("truth table " + m.name());
  }
  for (const auto& m : {mul3x3_1_model(), mul3x3_2_model()}) {
    const std::string text = write_pla({3, 3, minimize_all(enumerate_table(m))});
    if (write_pla(read_pla(text)) != text) fail("PLA " + m.name());
  }
  for (int v = 1; v <= 3; ++v) {
    Lut16::from_plan(build_plan(v)).save(work / "a.lut");
    Lut16::load(work / "a.lut").save(work / "b.lut");
    if (slurp(work / "a.lut") != slurp(work / "b.lut")) fail(fmt("LUT variant %d", v));
  }
  {
    dnn::Checkpoint cp = trained ? *trained : dnn::Checkpoint{dnn::LeNetModel::create(false, 1), std::nullopt};
    fs::create_directories(work / "ck1");
    fs::create_directories(work / "ck2");
    dnn::save_checkpoint(cp, work / "ck1" / "model.json");
    dnn::save_checkpoint(dnn::load_checkpoint(work / "ck1" / "model.json"), work / "ck2" / "model.json");
    for (const char* f : {"model.json", "model.bin"})
      if (slurp(work / "ck1" / f) != slurp(work / "ck2" / f)) fail(std::string("checkpoint ") + f);
  }
  {
    MetricsDocument doc{default_provenance(), {}};
    for (int v = 1; v <= 3; ++v) doc.reports.push_back(sweep(build_plan(v)));
    doc.reports.push_back(sweep(mul3x3_2_model()));
    const std::string j = to_json(doc), c = to_csv(doc);
    if (to_json(metrics_from_json(j)) != j) fail("JSON metrics report");
    if (to_csv(metrics_from_csv(c)) != c) fail("CSV metrics report");
  }
  o.summary = o.pass ? "truth table, PLA, LUT, checkpoint, JSON and CSV reports are byte-identical after reload"
                     : "round-trip failure";
  return o;
}

// --- DNN criteria ---------------------------------------------------------

struct DnnState {
  dnn::MnistSplits data;
  dnn::Dataset train, validation;
  dnn::Checkpoint checkpoint;
  dnn::QuantizedLeNet qmodel;
  double train_seconds = 0;
  double float_accuracy = 0;
  double baseline = 0;  // exact-LUT quantized test accuracy
  std::array<dnn::EvalResult, 3> variants;
  bool evaluated = false;
};

std::optional<DnnState> g_dnn;
std::string g_dnn_error;

DnnState* dnn_state(const fs::path& mnist, std::size_t epochs) {
  if (g_dnn) return &*g_dnn;
  if (!g_dnn_error.empty()) return nullptr;
  try {
    DnnState s;
    s.data = dnn::load_mnist_dir(mnist);
    const std::size_t n = s.data.train.size();
    if (n <= 5000) throw FormatError("training split has only " + std::to_string(n) + " images");
    s.train = s.data.train.slice(0, n - 5000);
    s.validation = s.data.train.slice(n - 5000, n);
    dnn::TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.seed = 1;
    cfg.log = [](const std::string& m) { std::cerr << "  " << m << std::endl; };
    const auto t0 = Clock::now();
    auto model = dnn::train_lenet(s.train, cfg, &s.data.test);
    auto cal = dnn::calibrate(model, s.train);
    s.train_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    s.float_accuracy = model.record.test_accuracy;
    s.qmodel = dnn::quantize_model(model, cal);
    s.checkpoint = {std::move(model), std::move(cal)};
    g_dnn = std::move(s);
    return &*g_dnn;
  } catch (const std::exception& e) {
    g_dnn_error = e.what();
    return nullptr;
  }
}

Outcome no_data() { return {false, "MNIST unavailable: " + g_dnn_error, {}, {}}; }

Outcome c7_substitution(DnnState* s) {
  if (!s) return no_data();
  const dnn::LutView exact(Lut16::exact());
  const auto t0 = Clock::now();
  std::size_t differ = 0, ref_correct = 0;
  for (std::size_t n = 0; n < s->data.test.size(); ++n) {
    const auto img = s->data.test.image(n);
    const auto a = dnn::forward_trace(s->qmodel, img, s->data.test.rows, s->data.test.cols, exact);
    const auto b = dnn::reference_trace(s->qmodel, img, s->data.test.rows, s->data.test.cols);
    bool same = a.logits == b.logits && a.activations.size() == b.activations.size();
    for (std::size_t i = 0; same && i < a.activations.size(); ++i) same = a.activations[i].codes == b.activations[i].codes;
    differ += !same;
    ref_correct += static_cast<std::size_t>(std::max_element(b.logits.begin(), b.logits.end()) - b.logits.begin()) ==
                   s->data.test.labels[n];
  }
  const double ref_acc = static_cast<double>(ref_correct) / static_cast<double>(s->data.test.size());
  const auto r = dnn::infer(s->qmodel, s->data.test, exact, "exact8", 1, ref_acc);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  Outcome o;
  o.pass = differ == 0 && r.dal == 0.0;
  o.summary = fmt("%zu/%zu test images differ from the integer reference in any tensor; DAL(exact) = %g pp (%.1f s excluding shared training)",
                  differ, s->data.test.size(), r.dal, secs);
  return o;
}

void evaluate_variants(DnnState* s) {
  if (s->evaluated) return;
  s->baseline = dnn::infer(s->qmodel, s->data.test, dnn::LutView(Lut16::exact()), "exact8").top1_accuracy;
  for (int v = 1; v <= 3; ++v)
    s->variants[v - 1] = dnn::infer(s->qmodel, s->data.test, dnn::LutView(Lut16::from_plan(build_plan(v))),
                                    build_plan(v).name(), 1, s->baseline);
  s->evaluated = true;
}

Outcome c8_dal_trend(DnnState* s) {
  if (!s) return no_data();
  const auto t0 = Clock::now();
  evaluate_variants(s);
  const double secs = s->train_seconds + std::chrono::duration<double>(Clock::now() - t0).count();
  const double d1 = s->variants[0].dal, d2 = s->variants[1].dal, d3 = s->variants[2].dal;
  Outcome o;
  o.pass = s->baseline >= 0.985 && d2 <= 0.3 && d2 <= d1 && d2 <= d3 && secs <= 1800.0;
  o.summary = fmt("baseline %.2f%% (float %.2f%%); DAL mul8x8_1 %.2f, mul8x8_2 %.2f, mul8x8_3 %.2f pp (%.0f s incl. "
                  "training)",
                  100.0 * s->baseline, 100.0 * s->float_accuracy, d1, d2, d3, secs);
  return o;
}

Outcome c9_retrain(DnnState* s, const fs::path& work, std::size_t epochs) {
  if (!s) return no_data();
  const auto t0 = Clock::now();
  evaluate_variants(s);
  std::size_t worst = 0;
  for (std::size_t v = 1; v < 3; ++v)
    if (s->variants[v].dal > s->variants[worst].dal) worst = v;
  const int variant = static_cast<int>(worst) + 1;
  const Lut16 lut = Lut16::from_plan(build_plan(variant));

  dnn::RetrainConfig cfg;
  cfg.epochs = epochs;
  cfg.log = [](const std::string& m) { std::cerr << "  " << m << std::endl; };
  const auto r = dnn::retrain(s->checkpoint.model, *s->checkpoint.calibration, lut, s->train, s->validation, cfg);
  const auto after = dnn::infer(dnn::quantize_model(r.model, r.calibration), s->data.test, dnn::LutView(lut),
                                build_plan(variant).name(), 1, s->baseline);
  const double before_dal = s->variants[worst].dal;
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();

  nlohmann::ordered_json rep{{"multiplier", build_plan(variant).name()},
                             {"validation_before", r.validation_before},
                             {"validation_after", r.validation_after},
                             {"epoch_validation", r.epoch_validation},
                             {"best_epoch", r.best_epoch},
                             {"test_dal_before_pp", before_dal},
                             {"test_dal_after_pp", after.dal},
                             {"notes", r.notes}};
  spit(work / "retrain_report.json", rep.dump(2) + "\n");

  Outcome o;
  const bool reduced = after.dal < before_dal;
  const bool kept_best = !r.improved && r.validation_after >= r.validation_before;
  o.pass = (reduced || kept_best) && secs <= 1800.0;
  o.summary = fmt("%s: test DAL %.2f -> %.2f pp; validation %.2f%% -> %.2f%% (best epoch %zu, %.0f s)",
                  build_plan(variant).name().c_str(), before_dal, after.dal, 100.0 * r.validation_before,
                  100.0 * r.validation_after, r.best_epoch, secs);
  if (!reduced && kept_best) o.details.push_back("no improvement; input checkpoint returned with report");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string mnist = std::getenv("APPROXMUL_MNIST") ? std::getenv("APPROXMUL_MNIST") : "/root/data/mnist";
  std::string work = (fs::temp_directory_path() / "approxmul_acceptance").string();
  std::vector<int> known;
  std::vector<int> only;
  std::size_t epochs = 5, retrain_epochs = 2;
  app.add_option("--mnist", mnist, "MNIST IDX directory");
  app.add_option("--work", work, "Scratch directory for generated artifacts");
  app.add_option("--known-deviation", known, "Criterion expected to fail in its documented way");
  app.add_option("--only", only, "Run only these criteria");
  app.add_option("--epochs", epochs, "Training epochs for the DNN criteria");
  app.add_option("--retrain-epochs", retrain_epochs);
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);

  // Documented failure signature for each allowed deviation.
  const std::map<int, std::string> documented{{3, "(2,2)(2,6)(6,2)(6,6)"}};
  for (int k : known)
    if (!documented.count(k)) {
      std::cerr << "criterion " << k << " has no documented deviation\n";
      return 2;
    }

  auto dnn = [&] { return dnn_state(mnist, epochs); };
  const std::vector<Criterion> criteria{
      {1, "3x3 exact-match", 1, c1_exact_match},
      {2, "modified-row oracle", 1, c2_row_oracle},
      {3, "sum-of-products equivalence", 1, c3_expressions},
      {4, "exact decomposition identity", 1, c4_exact_identity},
      {5, "8x8 metric internal consistency", 5, c5_consistency},
      {6, "8x8 accuracy soft reproduction", 10, [&] { return c6_table4(work); }},
      {7, "quantized substitution soundness", 120, [&] { return c7_substitution(dnn()); }},
      {8, "DAL trend", 1800, [&] { return c8_dal_trend(dnn()); }},
      {9, "retraining improvement", 1800, [&] { return c9_retrain(dnn(), work, retrain_epochs); }},
      {10, "logic-cost direction", 1, c10_logic_cost},
      {11, "format round-trips", 1,
       [&] { return c11_round_trips(work, g_dnn ? &g_dnn->checkpoint : nullptr); }},
  };

  std::set<int> failed;
  std::set<int> matched_known;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), {}, {}};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    // Criteria 8 and 9 check their own budgets, which include shared training.
    if (c.id != 8 && c.id != 9 && c.id != 7 && secs > c.budget_s) {
      o.pass = false;
      o.details.push_back(fmt("took %.2f s, budget %.0f s", secs, c.budget_s));
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << fmt(" [%2d] ", c.id) << c.title << ": " << o.summary
              << fmt(" (%.2f s)", secs) << '\n';
    for (const auto& d : o.details) std::cout << "       " << d << '\n';
    std::cout.flush();
    if (!o.pass) {
      failed.insert(c.id);
      const auto it = documented.find(c.id);
      if (it != documented.end() && it->second == o.signature) matched_known.insert(c.id);
    }
  }

  int status = 0;
  for (int id : failed) {
    const bool allowed = std::find(known.begin(), known.end(), id) != known.end() && matched_known.count(id);
    if (!allowed) status = 1;
  }
  for (int id : known)
    if (!failed.count(id) && (only.empty() || std::find(only.begin(), only.end(), id) != only.end())) {
      std::cout << "note: criterion " << id << " passed but is listed as a known deviation\n";
      status = 1;
    }
  std::cout << fmt("%zu failed", failed.size());
  if (!known.empty()) {
    std::cout << " (documented deviations:";
    for (int id : known) std::cout << ' ' << id;
    std::cout << ')';
  }
  std::cout << '\n';
  return status;
}
