#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "approxmul/aggregate.hpp"
#include "approxmul/dnn/inference.hpp"
#include "approxmul/dnn/lenet.hpp"
#include "approxmul/dnn/mnist.hpp"

namespace approxmul::dnn {

using LogFn = std::function<void(const std::string&)>;

struct TrainConfig {
  std::size_t epochs = 5;
  double learning_rate = 0.01;
  double momentum = 0.9;
  double l2 = 0.0;
  std::uint64_t seed = 1;
  std::size_t batch_size = 32;
  bool plus = false;
  LogFn log;
};

/// Minibatch SGD with momentum and softmax cross-entropy. Deterministic for a
/// fixed seed. Throws TrainingError on a non-finite loss. `test`, when given,
/// is only used to fill the training record.
LeNetModel train_lenet(const Dataset& train, const TrainConfig& config, const Dataset* test = nullptr);

struct RetrainConfig {
  std::size_t epochs = 2;
  double learning_rate = 0.002;
  double momentum = 0.9;
  double l2 = 1e-4;
  std::uint64_t seed = 7;
  std::size_t batch_size = 32;
  /// Forward through the LUT (straight-through backward); false trains in float with L2 only.
  bool lut_forward = true;
  LogFn log;
};

struct RetrainResult {
  LeNetModel model;
  Calibration calibration;
  double validation_before = 0.0;
  double validation_after = 0.0;
  std::vector<double> epoch_validation;
  /// 0 means the input model was kept.
  std::size_t best_epoch = 0;
  bool improved = false;
  std::vector<std::string> notes;
};

/// Fine-tunes against `lut`, keeps the checkpoint with the best LUT accuracy on
/// `validation`, and never returns a model worse than the input on it.
RetrainResult retrain(const LeNetModel& model, const Calibration& calibration, const Lut16& lut,
                      const Dataset& train, const Dataset& validation, const RetrainConfig& config);

}  // namespace approxmul::dnn
