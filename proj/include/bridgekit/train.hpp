#pragma once

#include <cstdint>
#include <vector>

#include "bridgekit/nn.hpp"
#include "bridgekit/sde.hpp"

namespace bridgekit {

enum class Optimizer { Sgd, Adam };
enum class TimeSampling { DeterministicGrid, IidUniform };

struct TrainConfig {
  std::size_t n_epochs = 200;
  std::size_t batch_size = 128;
  double learning_rate = 1e-3;
  double lr_decay = 0.0;  // per-epoch multiplicative decay: lr / (1 + decay * epoch)
  Optimizer optimizer = Optimizer::Adam;
  std::size_t grid_steps = 100;  // K, training grid resolution (>= 2)
  TimeSampling time_sampling = TimeSampling::IidUniform;
  bool freeze_init = true;
  std::uint64_t seed = 0;
  double drift_clamp = kDefaultDriftClamp;
  std::size_t steps_per_epoch = 0;  // 0: ceil(n / batch_size)
  std::size_t hidden_layers = 3;
  std::size_t width = 64;
};

// Discretized score-matching residual at grid knot t < T:
//   || (s_theta(Z_t, t) - eta^x(Z_t, t)) / sigma_t ||^2
// where eta^x is the bridge drift toward the path's endpoint. t must be a
// knot of the path's grid; the terminal knot is rejected.
double pointwise_residual(const ModelParams& params, const BridgeSpec& spec,
                          const Path& path, double t);

// Per-trajectory loss: -log p_0(Z_0) (unless frozen) plus the residual sum
// over the K interior knots only, scaled by 1/(2K).
double trajectory_loss(const ModelParams& params, const BridgeSpec& spec,
                       const Path& path, bool freeze_init);

// Test instrumentation: largest time at which a residual drift was
// evaluated since the last reset (thread-local).
double max_residual_eval_time();
void reset_max_residual_eval_time();

struct LossTraceRow {
  std::size_t epoch;
  double mean_loss;
  double wall_ms;
};

struct TrainResult {
  ModelParams params;
  std::vector<LossTraceRow> trace;
};

ModelParams make_initial_params(const BridgeSpec& spec, const TrainConfig& cfg);

// Stochastic-gradient training of the discretized objective. Fresh bridge
// paths are sampled per minibatch; the dataset (endpoints in Omega) is fixed.
TrainResult train(const std::vector<std::vector<double>>& dataset,
                  const BridgeSpec& spec, const TrainConfig& cfg);

}  // namespace bridgekit
