#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/model.hpp"

namespace fxcast {

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  std::uint64_t seed = 42;
  std::size_t patience = 10;          // 0 disables early stopping
  double validation_fraction = 0.1;   // chronologically last slice of train
  std::size_t threads = 0;            // 0 = hardware concurrency

  void validate() const;
};

// Moment accumulators mirror the parameter shapes.
struct AdamState {
  ModelGrads m;
  ModelGrads v;
  std::uint64_t step = 0;
};

AdamState adam_init(const ModelSpec& spec);

// One bias-corrected Adam update applied elementwise to every tensor.
void adam_step(ModelParams& params, const ModelGrads& grads, AdamState& state,
               const TrainConfig& config);

// Mean squared error and its per-prediction gradients 2(pred - target)/N.
std::pair<double, Vec> mse_loss(const Vec& predictions, const Vec& targets);

struct TrainReport {
  std::vector<double> train_loss;  // scaled-space MSE per epoch
  std::vector<double> val_loss;    // empty when validation is disabled
  std::size_t epochs_run = 0;
  bool stopped_early = false;
  double wall_seconds = 0.0;
};

// Minimizes scaled-space MSE over the training windows with mini-batch Adam.
// Batch order is a seeded Fisher-Yates shuffle of the index permutation; the
// batch gradient is the mean of per-sample gradients reduced in a fixed
// serial order, so results are bitwise reproducible for any thread count.
// With validation enabled and patience > 0, training stops after `patience`
// epochs without improvement and the best-validation parameters are restored.
std::pair<ModelParams, TrainReport> train(const ModelSpec& spec, const SplitDataset& data,
                                          const TrainConfig& config);

}  // namespace fxcast
