#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "approxmul/aggregate.hpp"
#include "approxmul/dnn/checkpoint.hpp"
#include "approxmul/dnn/inference.hpp"
#include "approxmul/dnn/training.hpp"
#include "approxmul/logicsynth.hpp"
#include "approxmul/metrics.hpp"
#include "designs.hpp"
#include "json.hpp"

namespace approxmul::cli {

namespace {

using ojson = nlohmann::ordered_json;

// Training uses the first 55000 images; the last 5000 are the held-out
// validation split for retraining.
constexpr std::size_t kValidationSize = 5000;

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot write " + path);
  os << text;
  if (!os) throw FormatError("write failed: " + path);
}

ReportFormat parse_format(const std::string& f) { return f == "json" ? ReportFormat::Json : ReportFormat::Csv; }

ojson provenance_json(const Provenance& p) {
  return ojson{{"tool_version", p.tool_version},
               {"index_map", p.index_map},
               {"metric_definitions", p.metric_definitions},
               {"notes", p.notes}};
}

Provenance dnn_provenance() {
  Provenance p = default_provenance();
  p.notes.push_back("quantization: per-tensor affine uint8, min/max calibration, LUT operand a = activation code, "
                    "b = weight code");
  p.notes.push_back("retraining: straight-through estimator with L2 weight decay (interpretation of 'retraining by "
                    "regularization')");
  p.notes.push_back("DAL: exact-multiplier accuracy minus approximate accuracy, percentage points");
  return p;
}

std::string mnist_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("APPROXMUL_MNIST"); env && *env) return env;
  throw UsageError("no MNIST directory: pass --mnist or set APPROXMUL_MNIST");
}

struct LutChoice {
  std::string name;
  Lut16 lut;
};

LutChoice resolve_lut(const std::string& lut, int variant, const std::string& model) {
  const int given = !lut.empty() + (variant != 0) + !model.empty();
  if (given > 1) throw UsageError("pass only one of --lut, --variant, --model");
  if (variant != 0) return {design_for_variant(variant).name, Lut16::from_plan(build_plan(variant))};
  if (!model.empty()) {
    const Design d = find_design(model);
    if (!d.plan) throw UsageError("multiplier '" + model + "' is not an 8x8 design");
    return {d.name, Lut16::from_plan(*d.plan)};
  }
  if (lut.empty() || lut == "exact") return {"exact8", Lut16::exact()};
  Lut16 loaded = Lut16::load(lut);
  std::string name = std::filesystem::path(lut).filename().string();
  return {name, std::move(loaded)};
}

dnn::Calibration checkpoint_calibration(const dnn::Checkpoint& cp, const dnn::Dataset& train) {
  if (cp.calibration) return *cp.calibration;
  return dnn::calibrate(cp.model, train);
}

dnn::Dataset training_split(const dnn::Dataset& train) {
  if (train.size() <= kValidationSize) throw FormatError("MNIST training set too small for the validation split");
  return train.slice(0, train.size() - kValidationSize);
}

dnn::Dataset validation_split(const dnn::Dataset& train) {
  if (train.size() <= kValidationSize) throw FormatError("MNIST training set too small for the validation split");
  return train.slice(train.size() - kValidationSize, train.size());
}

ojson eval_json(const dnn::EvalResult& r) {
  ojson j{{"multiplier", r.multiplier},
          {"count", r.count},
          {"correct", r.correct},
          {"top1_accuracy", r.top1_accuracy},
          {"dal_pp", r.dal}};
  j["per_class_accuracy"] = r.per_class_accuracy;
  return j;
}

std::string eval_csv(const dnn::EvalResult& r, const Provenance& p) {
  std::ostringstream os;
  os << "# tool_version: " << p.tool_version << '\n';
  os << "multiplier,count,correct,top1_accuracy,dal_pp";
  for (std::size_t c = 0; c < dnn::kNumClasses; ++c) os << ",class" << c;
  os << '\n' << r.multiplier << ',' << r.count << ',' << r.correct << ',' << ojson(r.top1_accuracy).dump() << ','
     << ojson(r.dal).dump();
  for (double a : r.per_class_accuracy) os << ',' << ojson(a).dump();
  os << '\n';
  return os.str();
}

ojson cost_json(const CostEstimate& c) {
  return ojson{{"literals", c.literal_count},
               {"cubes", c.cube_count},
               {"depth", c.two_level_depth},
               {"outputs", c.output_count}};
}

// --- subcommands ----------------------------------------------------------

int cmd_tt(const std::string& model, const std::string& out_path, std::ostream& out) {
  const Design d = find_design(model);
  if (d.model.width_a() + d.model.width_b() > 16) throw UsageError("truth tables are limited to 16 input bits");
  std::ostringstream os;
  write_truth_table(os, enumerate_table(d.model));
  emit(os.str(), out_path, out);
  return kOk;
}

int cmd_metrics(const std::string& model, int variant, bool all, const std::string& format, unsigned threads,
                const std::string& out_path, std::ostream& out, std::ostream& err) {
  std::vector<Design> designs;
  if (all) {
    for (const char* n : {"mul3x3_1", "mul3x3_2", "mul8x8_1", "mul8x8_2", "mul8x8_3"}) designs.push_back(find_design(n));
  } else if (variant != 0) {
    if (!model.empty()) throw UsageError("pass either a model or --variant");
    designs.push_back(design_for_variant(variant));
  } else if (!model.empty()) {
    designs.push_back(find_design(model));
  } else {
    throw UsageError("metrics needs a model name, --variant or --all");
  }

  MetricsDocument doc{default_provenance(), {}};
  bool consistent = true;
  for (const auto& d : designs) {
    ErrorReport r = d.plan ? sweep(*d.plan, threads) : sweep(d.model, threads);
    r.model = d.name;
    if (!internal_consistency(r)) {
      err << "internal consistency check failed for " << d.name << '\n';
      consistent = false;
    }
    doc.reports.push_back(std::move(r));
  }
  emit(render(doc, parse_format(format)), out_path, out);
  return consistent ? kOk : kConsistency;
}

int cmd_export_lut(int variant, const std::string& model, const std::string& out_path) {
  if (out_path.empty()) throw UsageError("export-lut needs --out");
  if (variant == 0 && model.empty()) throw UsageError("export-lut needs --variant or --model");
  resolve_lut({}, variant, model).lut.save(out_path);
  return kOk;
}

int cmd_synth(const std::string& model, const std::string& out_path, const std::string& pla_path,
              const std::string& report_path, std::ostream& out) {
  if (out_path.empty()) throw UsageError("synth needs --out for the netlist");
  const Design d = find_design(model);
  const unsigned wa = d.model.width_a(), wb = d.model.width_b();
  if (wa + wb > 8) throw UsageError("synth supports designs with at most 8 input bits");

  const TruthTable table = enumerate_table(d.model);
  const auto covers = minimize_all(table);
  for (const auto& c : covers) {
    const auto eq = verify_equivalence(c, table, c.output_index);
    if (!eq.equivalent)
      throw ConsistencyError("minimized cover for o[" + std::to_string(c.output_index) +
                             "] differs from the truth table at input " + std::to_string(eq.counterexample.value_or(0)));
  }

  NetlistOptions opts{wa, wb, {d.name + ": two-level sum of products, one assign per output bit"}};
  for (unsigned bit = table.out_width(); bit < wa + wb; ++bit)
    opts.comments.push_back("product bit " + std::to_string(bit) + " is not an output: constant 0 by design");
  emit(emit_verilog(d.name, covers, opts), out_path, out);
  if (!pla_path.empty()) emit(write_pla({wa, wb, covers}), pla_path, out);

  ojson j;
  j["provenance"] = provenance_json(default_provenance());
  j["model"] = d.name;
  j["inputs"] = wa + wb;
  j["outputs"] = table.out_width();
  const CostEstimate cost = cost_estimate(covers);
  j["minimized"] = cost_json(cost);
  if (wa == wb) {
    const auto ref = minimize_all(enumerate_table(exact_model(wa)));
    const CostEstimate ref_cost = cost_estimate(ref);
    j["exact_reference"] = cost_json(ref_cost);
    j["literal_change_pct"] =
        ref_cost.literal_count ? 100.0 * (static_cast<double>(cost.literal_count) - ref_cost.literal_count) /
                                     ref_cost.literal_count
                               : 0.0;
  }
  if (d.name == "mul3x3_1" || d.name == "eqn3x3_1") {
    const auto published = published_331_covers();
    ojson pub{{"cost", cost_json(cost_estimate(published))}};
    ojson mismatches = ojson::array();
    for (std::uint32_t a = 0; a < 8; ++a)
      for (std::uint32_t b = 0; b < 8; ++b)
        if (eval_expressions_331(a, b) != mul3x3_1(a, b))
          mismatches.push_back(ojson{{"a", a}, {"b", b}, {"table", mul3x3_1(a, b)}, {"equations", eval_expressions_331(a, b)}});
    pub["matches_table"] = mismatches.empty();
    pub["mismatches"] = std::move(mismatches);
    j["published_equations"] = std::move(pub);
  }
  emit(j.dump(2) + "\n", report_path, out);
  return kOk;
}

int cmd_eval(const std::string& checkpoint, const std::string& mnist, const LutChoice& lut, const std::string& format,
             unsigned threads, const std::string& out_path, std::ostream& out) {
  if (checkpoint.empty()) throw UsageError("eval needs --checkpoint");
  const auto cp = dnn::load_checkpoint(checkpoint);
  const auto data = dnn::load_mnist_dir(mnist_dir(mnist));
  const auto q = dnn::quantize_model(cp.model, checkpoint_calibration(cp, training_split(data.train)));
  const auto r = dnn::infer(q, data.test, dnn::LutView(lut.lut), lut.name, threads);
  const Provenance p = dnn_provenance();
  if (format == "csv") {
    emit(eval_csv(r, p), out_path, out);
  } else {
    ojson j;
    j["provenance"] = provenance_json(p);
    j["topology"] = cp.model.plus ? "lenet+" : "lenet";
    j["result"] = eval_json(r);
    emit(j.dump(2) + "\n", out_path, out);
  }
  return kOk;
}

int cmd_train(const std::string& mnist, const dnn::TrainConfig& config, const std::string& out_path,
              unsigned threads, std::ostream& out, std::ostream& err) {
  if (out_path.empty()) throw UsageError("train needs --out for the checkpoint manifest");
  const auto data = dnn::load_mnist_dir(mnist_dir(mnist));
  const auto train = training_split(data.train);
  dnn::TrainConfig cfg = config;
  cfg.log = [&err](const std::string& m) { err << m << '\n'; };
  auto model = dnn::train_lenet(train, cfg, &data.test);
  const auto cal = dnn::calibrate(model, train);
  for (const auto& w : cal.warnings) err << "warning: " << w << '\n';
  dnn::save_checkpoint({model, cal}, out_path);

  const auto q = dnn::quantize_model(model, cal);
  const auto exact = dnn::infer(q, data.test, dnn::LutView(Lut16::exact()), "exact8", threads);
  ojson j{{"checkpoint", out_path},
          {"topology", model.plus ? "lenet+" : "lenet"},
          {"float_test_accuracy", model.record.test_accuracy},
          {"quantized_test_accuracy", exact.top1_accuracy}};
  out << j.dump(2) << '\n';
  return kOk;
}

int cmd_retrain(const std::string& checkpoint, const std::string& mnist, const LutChoice& lut,
                const dnn::RetrainConfig& config, const std::string& out_path, const std::string& report_path,
                unsigned threads, std::ostream& out, std::ostream& err) {
  if (checkpoint.empty() || out_path.empty()) throw UsageError("retrain needs --checkpoint and --out");
  const auto cp = dnn::load_checkpoint(checkpoint);
  const auto data = dnn::load_mnist_dir(mnist_dir(mnist));
  const auto train = training_split(data.train);
  const auto validation = validation_split(data.train);
  const auto cal = checkpoint_calibration(cp, train);

  dnn::RetrainConfig cfg = config;
  cfg.log = [&err](const std::string& m) { err << m << '\n'; };
  const auto r = dnn::retrain(cp.model, cal, lut.lut, train, validation, cfg);
  dnn::save_checkpoint({r.model, r.calibration}, out_path);

  // Both DAL figures use the original exact-multiplier accuracy as reference.
  const auto q0 = dnn::quantize_model(cp.model, cal);
  const double baseline = dnn::infer(q0, data.test, dnn::LutView(Lut16::exact()), "exact8", threads).top1_accuracy;
  const dnn::LutView view(lut.lut);
  const auto before = dnn::infer(q0, data.test, view, lut.name, threads, baseline);
  const auto after = dnn::infer(dnn::quantize_model(r.model, r.calibration), data.test, view, lut.name, threads, baseline);

  ojson j;
  j["provenance"] = provenance_json(dnn_provenance());
  j["multiplier"] = lut.name;
  j["checkpoint"] = out_path;
  j["mode"] = config.lut_forward ? "lut-forward" : "float";
  j["validation_before"] = r.validation_before;
  j["validation_after"] = r.validation_after;
  j["epoch_validation"] = r.epoch_validation;
  j["best_epoch"] = r.best_epoch;
  j["improved"] = r.improved;
  j["baseline_test_accuracy"] = baseline;
  j["test_before"] = eval_json(before);
  j["test_after"] = eval_json(after);
  j["notes"] = r.notes;
  emit(j.dump(2) + "\n", report_path, out);
  return kOk;
}

int cmd_hist(const std::string& checkpoint, const std::string& mnist, std::size_t count, const std::string& format,
             const std::string& out_path, std::ostream& out) {
  if (checkpoint.empty()) throw UsageError("hist needs --checkpoint");
  const auto cp = dnn::load_checkpoint(checkpoint);
  const auto data = dnn::load_mnist_dir(mnist_dir(mnist));
  const auto q = dnn::quantize_model(cp.model, checkpoint_calibration(cp, training_split(data.train)));
  const auto h = dnn::weight_code_histogram(q, data.test, count);
  if (format == "csv") {
    std::ostringstream os;
    os << "range,weight_fraction,activation_fraction\n";
    for (std::size_t i = 0; i < h.ranges.size(); ++i)
      os << h.ranges[i].lo << '-' << h.ranges[i].hi << ',' << ojson(h.weight_fractions[i]).dump() << ','
         << ojson(h.activation_fractions.empty() ? 0.0 : h.activation_fractions[i]).dump() << '\n';
    emit(os.str(), out_path, out);
    return kOk;
  }
  ojson j;
  j["provenance"] = provenance_json(dnn_provenance());
  j["weight_codes"] = h.weight_codes;
  j["activation_codes"] = h.activation_codes;
  j["zero_points"] = ojson::array();
  for (const auto& l : q.layers) j["zero_points"].push_back(ojson{{"layer", l.spec.name}, {"weight", l.weights.params.zero_point}});
  ojson ranges = ojson::array();
  for (std::size_t i = 0; i < h.ranges.size(); ++i)
    ranges.push_back(ojson{{"lo", h.ranges[i].lo},
                           {"hi", h.ranges[i].hi},
                           {"weight_fraction", h.weight_fractions[i]},
                           {"activation_fraction", h.activation_fractions.empty() ? 0.0 : h.activation_fractions[i]}});
  j["ranges"] = std::move(ranges);
  emit(j.dump(2) + "\n", out_path, out);
  return kOk;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Approximate multiplier modelling, error metrics, logic synthesis and DNN evaluation", "approxmul"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(default_provenance().tool_version));

  std::string model, format = "csv", out_path, mnist, lut, checkpoint, pla, report;
  int variant = 0;
  bool all = false, plus = false, float_only = false;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t epochs = 0, count = 500;
  double lr = 0.0, l2 = -1.0;

  const auto fmt_check = CLI::IsMember({"csv", "json"});
  auto add_common = [&](CLI::App* c) {
    c->add_option("--out", out_path, "Output path (stdout when omitted)");
    c->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 256u));
  };

  auto* tt = app.add_subcommand("tt", "Write a multiplier truth table");
  tt->add_option("model,--model", model, "Multiplier name")->required();
  add_common(tt);

  auto* met = app.add_subcommand("metrics", "Exhaustive error metrics");
  met->add_option("model,--model", model, "Multiplier name");
  met->add_option("--variant", variant, "8x8 variant")->check(CLI::Range(1, 3));
  met->add_flag("--all", all, "Every approximate design");
  met->add_option("--format", format)->check(fmt_check);
  add_common(met);

  auto* exp = app.add_subcommand("export-lut", "Write the 8x8 product table as a binary LUT");
  exp->add_option("--variant", variant)->check(CLI::Range(1, 3));
  exp->add_option("--model", model);
  add_common(exp);

  auto* syn = app.add_subcommand("synth", "Minimize covers, emit a netlist and a cost report");
  syn->add_option("model,--model", model, "Multiplier name (at most 8 input bits)")->required();
  syn->add_option("--pla", pla, "Also write the covers as PLA");
  syn->add_option("--report", report, "Cost report path (stdout when omitted)");
  add_common(syn);

  auto* ev = app.add_subcommand("eval", "Top-1 accuracy and DAL with a LUT multiplier");
  ev->add_option("--checkpoint", checkpoint)->required();
  ev->add_option("--mnist", mnist);
  ev->add_option("--lut", lut, "LUT file or 'exact'");
  ev->add_option("--variant", variant)->check(CLI::Range(1, 3));
  ev->add_option("--model", model);
  ev->add_option("--format", format)->check(fmt_check);
  add_common(ev);

  auto* tr = app.add_subcommand("train", "Train LeNet in float and save a calibrated checkpoint");
  tr->add_option("--mnist", mnist);
  tr->add_option("--epochs", epochs);
  tr->add_option("--lr", lr);
  tr->add_option("--l2", l2);
  tr->add_option("--seed", seed);
  tr->add_flag("--plus", plus, "LeNet+ (extra 3x3 convolution)");
  add_common(tr);

  auto* rt = app.add_subcommand("retrain", "Fine-tune a checkpoint against a LUT multiplier");
  rt->add_option("--checkpoint", checkpoint)->required();
  rt->add_option("--mnist", mnist);
  rt->add_option("--lut", lut);
  rt->add_option("--variant", variant)->check(CLI::Range(1, 3));
  rt->add_option("--model", model);
  rt->add_option("--epochs", epochs);
  rt->add_option("--lr", lr);
  rt->add_option("--l2", l2);
  rt->add_option("--seed", seed);
  rt->add_flag("--float-only", float_only, "Float forward pass with L2 only");
  rt->add_option("--report", report, "Report path (stdout when omitted)");
  add_common(rt);

  auto* hi = app.add_subcommand("hist", "Weight and activation code range fractions");
  hi->add_option("--checkpoint", checkpoint)->required();
  hi->add_option("--mnist", mnist);
  hi->add_option("--count", count, "Test images scanned for activations");
  hi->add_option("--format", format)->check(fmt_check);
  add_common(hi);

  auto* hy = app.add_subcommand("hypotheses", "Score aggregation hypotheses against the published 8x8 figures");
  add_common(hy);

  auto* pl = app.add_subcommand("plan", "Describe an 8x8 aggregation plan");
  pl->add_option("--variant", variant)->required()->check(CLI::Range(1, 3));
  add_common(pl);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (*tt) return cmd_tt(model, out_path, out);
  if (*met) return cmd_metrics(model, variant, all, format, threads, out_path, out, err);
  if (*exp) return cmd_export_lut(variant, model, out_path);
  if (*syn) return cmd_synth(model, out_path, pla, report, out);
  if (*ev) {
    if (!ev->count("--format")) format = "json";
    return cmd_eval(checkpoint, mnist, resolve_lut(lut, variant, model), format, threads, out_path, out);
  }
  if (*tr) {
    dnn::TrainConfig cfg;
    if (epochs) cfg.epochs = epochs;
    if (lr > 0.0) cfg.learning_rate = lr;
    if (l2 >= 0.0) cfg.l2 = l2;
    if (tr->count("--seed")) cfg.seed = seed;
    cfg.plus = plus;
    return cmd_train(mnist, cfg, out_path, threads, out, err);
  }
  if (*rt) {
    dnn::RetrainConfig cfg;
    if (epochs) cfg.epochs = epochs;
    if (lr > 0.0) cfg.learning_rate = lr;
    if (l2 >= 0.0) cfg.l2 = l2;
    if (rt->count("--seed")) cfg.seed = seed;
    cfg.lut_forward = !float_only;
    return cmd_retrain(checkpoint, mnist, resolve_lut(lut, variant, model), cfg, out_path, report, threads, out, err);
  }
  if (*hi) {
    if (!hi->count("--format")) format = "json";
    return cmd_hist(checkpoint, mnist, count, format, out_path, out);
  }
  if (*hy) {
    emit(to_json(sweep_hypotheses(threads), default_provenance()), out_path, out);
    return kOk;
  }
  if (*pl) {
    emit(describe_plan(build_plan(variant)), out_path, out);
    return kOk;
  }
  return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConsistencyError& e) {
    err << "consistency failure: " << e.what() << '\n';
    return kConsistency;
  } catch (const TrainingError& e) {
    err << "training failed: " << e.what() << '\n';
    return kConsistency;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
}

}  // namespace approxmul::cli
