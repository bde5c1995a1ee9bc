#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dale/dataset.hpp"
#include "dale/mlp.hpp"

namespace dale {

struct TrainOptions {
  std::size_t epochs = 20;
  double learning_rate = 0.01;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainResult {
  MlpModel model;
  // Full-data mean squared error after each epoch.
  std::vector<double> loss_history;
};

// Minibatch Adam on the mean squared error. Deterministic for a fixed seed.
// Throws a divergence error naming the epoch if the loss becomes non-finite.
TrainResult train_mlp(const MlpModel& initial, const Dataset& X, std::span<const double> y,
                      const TrainOptions& options);

double mean_squared_error(const DifferentiableModel& model, const Dataset& X,
                          std::span<const double> y);

}  // namespace dale
