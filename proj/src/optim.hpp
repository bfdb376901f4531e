#pragma once

#include <cstdint>
#include <vector>

#include "network.hpp"

namespace hds::nn {

double mse(const std::vector<double>& pred, const std::vector<double>& target);

struct AdamConfig {
  double lr = 1e-3;
  double rho1 = 0.9;
  double rho2 = 0.999;
  double eps = 1e-8;
};

// First/second moment accumulators, one block per parameter tensor.
struct AdamState {
  std::vector<Tensor> s_w, r_w, s_b, r_b;
  std::int64_t t = 0;

  explicit AdamState(const Network& net);
  // Applies one update from the gradients currently held by the network.
  void step(Network& net, const AdamConfig& cfg);
};

struct TrainConfig {
  int epochs = 200;
  int batch_size = 64;
  AdamConfig adam;
  double val_fraction = 0.1;
  int patience = 20;  // epochs without val improvement before stopping; 0 disables
  double min_delta = 0.0;
  std::uint64_t seed = 0;  // drives the split and per-epoch shuffle streams
};

struct TrainResult {
  std::vector<double> train_loss;  // one entry per epoch run
  std::vector<double> val_loss;
  int best_epoch = -1;  // 0-based index into the loss histories
  double best_val = 0.0;
  int epochs_run = 0;
};

// x: N x (input_shape...), y: length N. Trains in place; the network is left
// holding the parameters of the best validation epoch.
TrainResult train(Network& net, const Tensor& x, const std::vector<double>& y,
                  const TrainConfig& cfg);

}  // namespace hds::nn
