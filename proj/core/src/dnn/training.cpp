#include "approxmul/dnn/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "approxmul/error.hpp"
#include "net.hpp"

namespace approxmul::dnn {

namespace {

struct Optimizer {
  double lr;
  double momentum;
  double l2;
  std::vector<std::vector<float>> vw, vb;

  Optimizer(const LeNetModel& m, double lr_, double momentum_, double l2_) : lr(lr_), momentum(momentum_), l2(l2_) {
    for (const auto& l : m.layers) {
      vw.emplace_back(l.weight.size(), 0.0f);
      vb.emplace_back(l.bias.size(), 0.0f);
    }
  }

  void step(LeNetModel& m, const detail::Gradients& g, std::size_t batch) {
    const float inv = 1.0f / static_cast<float>(batch);
    const auto mom = static_cast<float>(momentum), rate = static_cast<float>(lr), decay = static_cast<float>(l2);
    for (std::size_t i = 0; i < m.layers.size(); ++i) {
      auto& w = m.layers[i].weight;
      for (std::size_t k = 0; k < w.size(); ++k) {
        vw[i][k] = mom * vw[i][k] - rate * (g.weight[i][k] * inv + decay * w[k]);
        w[k] += vw[i][k];
      }
      auto& b = m.layers[i].bias;
      for (std::size_t k = 0; k < b.size(); ++k) {
        vb[i][k] = mom * vb[i][k] - rate * g.bias[i][k] * inv;
        b[k] += vb[i][k];
      }
    }
  }
};

std::string fmt(const char* what, std::size_t epoch, double a, double b) {
  std::ostringstream os;
  os << what << " epoch " << epoch << ": " << a << " / " << b;
  return os.str();
}

double lut_accuracy(const LeNetModel& model, const Calibration& cal, const Dataset& data, const LutView& lut) {
  const auto q = quantize_model(model, cal);
  return infer(q, data, lut, "retrain", 1, 0.0).top1_accuracy;
}

}  // namespace

LeNetModel train_lenet(const Dataset& train, const TrainConfig& config, const Dataset* test) {
  if (train.size() == 0) throw DomainError("training set is empty");
  if (config.batch_size == 0 || config.epochs == 0) throw DomainError("epochs and batch size must be positive");
  if (!(config.learning_rate > 0.0) || config.l2 < 0.0) throw DomainError("invalid learning rate or l2");

  LeNetModel model = LeNetModel::create(config.plus, config.seed);
  detail::Network net(model);
  detail::Gradients grads(model);
  Optimizer opt(model, config.learning_rate, config.momentum, config.l2);
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<float> dlogits(kNumClasses);

  std::size_t correct = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss = 0.0;
    correct = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      grads.zero();
      for (std::size_t j = start; j < end; ++j) {
        const std::size_t n = order[j];
        const auto logits = net.forward(model, image_to_input(train.image(n), train.rows, train.cols));
        correct += detail::argmax(logits) == train.labels[n];
        const double l = detail::softmax_xent(logits, train.labels[n], dlogits);
        if (!std::isfinite(l)) throw TrainingError("non-finite loss in epoch " + std::to_string(epoch));
        loss += l;
        net.backward(model, dlogits, grads);
      }
      opt.step(model, grads, end - start);
    }
    if (config.log)
      config.log(fmt("train", epoch, loss / static_cast<double>(train.size()),
                     static_cast<double>(correct) / static_cast<double>(train.size())));
  }

  model.record = {config.epochs, config.learning_rate, config.l2, config.seed,
                  static_cast<double>(correct) / static_cast<double>(train.size()),
                  test ? float_accuracy(model, *test) : 0.0};
  return model;
}

RetrainResult retrain(const LeNetModel& model, const Calibration& calibration, const Lut16& lut,
                      const Dataset& train, const Dataset& validation, const RetrainConfig& config) {
  model.validate();
  if (train.size() == 0 || validation.size() == 0) throw DomainError("retraining needs train and validation data");
  if (config.batch_size == 0) throw DomainError("batch size must be positive");

  const LutView view(lut);
  RetrainResult r{model, calibration, 0.0, 0.0, {}, 0, false, {}};
  r.notes.push_back(config.lut_forward ? "straight-through estimator: LUT forward pass, float backward pass, L2 on weights"
                                       : "float fine-tuning with L2 on weights only");
  r.validation_before = lut_accuracy(model, calibration, validation, view);
  r.validation_after = r.validation_before;

  LeNetModel current = model;
  Calibration cal = calibration;
  detail::Network net(current);
  detail::Gradients grads(current);
  Optimizer opt(current, config.learning_rate, config.momentum, config.l2);
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<float> dlogits(kNumClasses);

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      if (config.lut_forward) recalibrate_weights(current, cal);
      grads.zero();
      for (std::size_t j = start; j < end; ++j) {
        const std::size_t n = order[j];
        const auto input = image_to_input(train.image(n), train.rows, train.cols);
        const auto logits = config.lut_forward ? net.forward_lut(current, input, cal, view) : net.forward(current, input);
        const double l = detail::softmax_xent(logits, train.labels[n], dlogits);
        if (!std::isfinite(l)) throw TrainingError("non-finite loss while retraining, epoch " + std::to_string(epoch));
        loss += l;
        net.backward(current, dlogits, grads);
      }
      opt.step(current, grads, end - start);
    }
    recalibrate_weights(current, cal);
    const double acc = lut_accuracy(current, cal, validation, view);
    r.epoch_validation.push_back(acc);
    if (config.log) config.log(fmt("retrain", epoch, loss / static_cast<double>(train.size()), acc));
    if (acc > r.validation_after) {
      r.validation_after = acc;
      r.best_epoch = epoch;
      r.model = current;
      r.calibration = cal;
    }
  }
  r.calibration.warnings.clear();

  r.improved = r.best_epoch > 0;
  if (!r.improved) r.notes.push_back("no epoch beat the input model on validation; input model returned");
  r.model.record.epochs += r.best_epoch;
  return r;
}

}  // namespace approxmul::dnn
