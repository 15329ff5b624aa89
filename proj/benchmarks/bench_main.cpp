#include <benchmark/benchmark.h>

#include <random>

#include "approxmul/aggregate.hpp"
#include "approxmul/dnn/inference.hpp"
#include "approxmul/dnn/lut_ops.hpp"
#include "approxmul/logicsynth.hpp"
#include "approxmul/metrics.hpp"

using namespace approxmul;

static void BM_SweepPlan(benchmark::State& state) {
  const auto plan = build_plan(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sweep(plan, 1));
  state.SetItemsProcessed(state.iterations() * 65536);
}
BENCHMARK(BM_SweepPlan)->Arg(1)->Arg(3);

static void BM_SweepModel(benchmark::State& state) {
  const auto model = as_model(build_plan(2));
  for (auto _ : state) benchmark::DoNotOptimize(sweep(model, 1));
  state.SetItemsProcessed(state.iterations() * 65536);
}
BENCHMARK(BM_SweepModel);

static void BM_AggregateMul(benchmark::State& state) {
  const auto plan = build_plan(2);
  std::uint32_t a = 0, acc = 0;
  for (auto _ : state) {
    acc += plan(a & 255, (a >> 8) & 255);
    ++a;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_AggregateMul);

static void BM_BuildLut(benchmark::State& state) {
  const auto plan = build_plan(1);
  for (auto _ : state) benchmark::DoNotOptimize(Lut16::from_plan(plan));
}
BENCHMARK(BM_BuildLut);

static void BM_MinimizeAll(benchmark::State& state) {
  const auto table = enumerate_table(state.range(0) ? exact_model(3) : mul3x3_1_model());
  for (auto _ : state) benchmark::DoNotOptimize(minimize_all(table));
}
BENCHMARK(BM_MinimizeAll)->Arg(0)->Arg(1);

namespace {

dnn::QuantizedTensor random_tensor(std::vector<std::size_t> shape, std::uint8_t zp, std::uint64_t seed) {
  dnn::QuantizedTensor t{std::move(shape), {}, {0.01, zp}};
  t.codes.resize(t.element_count());
  std::mt19937_64 rng(seed);
  for (auto& c : t.codes) c = static_cast<std::uint8_t>(rng());
  return t;
}

}  // namespace

static void BM_LutConv(benchmark::State& state) {
  // conv2 of LeNet: 6x14x14 input, 16 5x5 kernels
  const auto x = random_tensor({6, 14, 14}, 0, 1);
  const auto k = random_tensor({16, 6, 5, 5}, 128, 2);
  const std::vector<float> b(16, 0.0f);
  const dnn::LutView lut(Lut16::from_plan(build_plan(2)));
  for (auto _ : state) benchmark::DoNotOptimize(dnn::lut_conv2d_acc(x, k, b, lut, 1, 0));
  state.SetItemsProcessed(state.iterations() * 16 * 10 * 10 * 150);
}
BENCHMARK(BM_LutConv);

static void BM_ReferenceConv(benchmark::State& state) {
  const auto x = random_tensor({6, 14, 14}, 0, 1);
  const auto k = random_tensor({16, 6, 5, 5}, 128, 2);
  const std::vector<float> b(16, 0.0f);
  for (auto _ : state) benchmark::DoNotOptimize(dnn::reference::conv2d_acc(x, k, b, 1, 0));
  state.SetItemsProcessed(state.iterations() * 16 * 10 * 10 * 150);
}
BENCHMARK(BM_ReferenceConv);

static void BM_LutLinear(benchmark::State& state) {
  const auto x = random_tensor({400}, 0, 3);
  const auto w = random_tensor({120, 400}, 128, 4);
  const std::vector<float> b(120, 0.0f);
  const dnn::LutView lut(Lut16::from_plan(build_plan(1)));
  for (auto _ : state) benchmark::DoNotOptimize(dnn::lut_linear_acc(x, w, b, lut));
  state.SetItemsProcessed(state.iterations() * 120 * 400);
}
BENCHMARK(BM_LutLinear);

static void BM_PredictLeNet(benchmark::State& state) {
  const auto model = dnn::LeNetModel::create(false, 1);
  dnn::Calibration cal;
  cal.input = {1.0 / 255.0, 0};
  for (const auto& l : model.layers) {
    cal.weights.push_back(dnn::calibrate_tensor(l.weight));
    cal.outputs.push_back({0.05, 0});
  }
  const auto q = dnn::quantize_model(model, cal);
  std::vector<std::uint8_t> img(28 * 28);
  std::mt19937_64 rng(5);
  for (auto& p : img) p = static_cast<std::uint8_t>(rng());
  const dnn::LutView lut(Lut16::from_plan(build_plan(2)));
  for (auto _ : state) benchmark::DoNotOptimize(dnn::predict(q, img, 28, 28, lut));
}
BENCHMARK(BM_PredictLeNet);
BENCHMARK_MAIN();
