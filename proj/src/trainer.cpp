#include "dale/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dale/errors.hpp"
#include "dale/rng.hpp"

namespace dale {
namespace {

void adam_step(MlpParameterGradient& m, MlpParameterGradient& v, const MlpParameterGradient& g,
               MlpParameterGradient& step, const TrainOptions& o, std::uint64_t t) {
  const double c1 = 1.0 - std::pow(o.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(o.beta2, static_cast<double>(t));
  auto update = [&](auto& mm, auto& vv, const auto& gg, auto& ss) {
    mm = o.beta1 * mm + (1.0 - o.beta1) * gg;
    vv = o.beta2 * vv + (1.0 - o.beta2) * gg.cwiseProduct(gg);
    ss = -o.learning_rate * (mm / c1).cwiseQuotient(((vv / c2).cwiseSqrt().array() + o.epsilon).matrix());
  };
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    update(m.weights[l], v.weights[l], g.weights[l], step.weights[l]);
    update(m.biases[l], v.biases[l], g.biases[l], step.biases[l]);
  }
}

}  // namespace

double mean_squared_error(const DifferentiableModel& model, const Dataset& X,
                          std::span<const double> y) {
  const auto pred = model.value_batch(X.values());
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) acc += (pred[i] - y[i]) * (pred[i] - y[i]);
  return acc / static_cast<double>(pred.size());
}

TrainResult train_mlp(const MlpModel& initial, const Dataset& X, std::span<const double> y,
                      const TrainOptions& options) {
  if (options.epochs < 1) throw Error(ErrorKind::parameter, "epochs must be at least 1");
  if (options.batch_size < 1) throw Error(ErrorKind::parameter, "batch size must be at least 1");
  if (!(options.learning_rate > 0.0)) throw Error(ErrorKind::parameter, "learning rate must be positive");
  if (X.empty()) throw Error(ErrorKind::empty_input, "training set has no rows");
  if (X.size() != y.size()) {
    throw Error(ErrorKind::shape, "training set has " + std::to_string(X.size()) + " rows but " +
                                      std::to_string(y.size()) + " targets");
  }
  if (X.dim() != initial.dim()) throw Error(ErrorKind::shape, "training set width does not match the model");

  TrainResult result{initial, {}};
  MlpModel& model = result.model;
  auto grad = model.zero_gradient();
  auto m = model.zero_gradient();
  auto v = model.zero_gradient();
  auto step = model.zero_gradient();

  std::vector<std::size_t> order(X.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(options.seed);
  std::uint64_t t = 0;

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    // Fisher-Yates with the project generator so histories are portable.
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(rng() % i);
      std::swap(order[i - 1], order[j]);
    }
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t stop = std::min(order.size(), start + options.batch_size);
      const double inv = 1.0 / static_cast<double>(stop - start);
      grad.set_zero();
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = order[k];
        const double target = y[i];
        model.accumulate_parameter_gradient(
            X.row(i), [&](double pred) { return 2.0 * (pred - target) * inv; }, grad);
      }
      adam_step(m, v, grad, step, options, ++t);
      model.apply_update(step);
    }
    const double loss = mean_squared_error(model, X, y);
    if (!std::isfinite(loss)) {
      throw Error(ErrorKind::divergence, "training diverged at epoch " + std::to_string(epoch));
    }
    result.loss_history.push_back(loss);
  }
  model.counters().reset();
  return result;
}

}  // namespace dale
