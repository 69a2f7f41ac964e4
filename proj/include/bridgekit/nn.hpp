#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "bridgekit/bridges.hpp"
#include "bridgekit/rng.hpp"

namespace bridgekit {

// Fixed 4-wide time embedding; the sqrt(1 - t/T) feature lets the network
// express drifts that grow toward the horizon.
std::array<double, 4> time_features(double t, double horizon);
inline constexpr std::size_t kTimeFeatures = 4;

struct MlpArchitecture {
  std::size_t dim = 1;            // domain dimension d (input z and output)
  std::size_t hidden_layers = 3;  // H
  std::size_t width = 64;         // W

  std::size_t input_width() const { return dim + kTimeFeatures; }
  std::size_t param_count() const;
};

// MLP f_theta(z, t): (d + 4) -> W -> ... -> W -> d, tanh hidden activations,
// linear output. Weights live in one flat vector, per layer row-major W then
// bias.
struct Mlp {
  MlpArchitecture arch;
  std::vector<double> params;

  static Mlp zeros(const MlpArchitecture& arch);
  // He-style normal init, deterministic given the rng stream.
  static Mlp random(const MlpArchitecture& arch, Rng& rng);
};

// Scratch buffers reused across forward/backward calls.
struct MlpWorkspace {
  std::vector<std::vector<double>> pre;   // pre-activations per layer
  std::vector<std::vector<double>> act;   // activations per layer (act[0] = input)
  std::vector<double> delta;              // backprop buffer
};

// Forward pass; returns f_theta(z, t) and caches activations in ws.
std::vector<double> mlp_forward(const Mlp& mlp, const std::vector<double>& z,
                                double t, double horizon, MlpWorkspace& ws);
std::vector<double> mlp_forward(const Mlp& mlp, const std::vector<double>& z,
                                double t, double horizon);

// Gradient of 0.5 * ||f_theta(z, t) - target||^2 w.r.t. all weights, where
// residual = f_theta(z, t) - target from the matching forward pass (its
// activations must still be in ws). Accumulates into grad (flat, same layout
// as params).
void mlp_backward(const Mlp& mlp, const MlpWorkspace& ws,
                  const std::vector<double>& residual, std::vector<double>& grad,
                  MlpWorkspace& scratch);
std::vector<double> mlp_backward(const Mlp& mlp, const std::vector<double>& z,
                                 double t, double horizon,
                                 const std::vector<double>& residual);

struct GradCheckReport {
  bool pass = false;
  double max_rel_err = 0.0;
  std::size_t probes = 0;
};

// Compares analytic gradients against central finite differences on
// n_probes random (weight coordinate, input) pairs.
GradCheckReport grad_check(const Mlp& mlp, std::size_t n_probes, double tol,
                           Rng& rng);

// Model initial distribution P_0: either a trainable diagonal Gaussian
// (mean vector, shared log-variance) or a frozen InitRule.
struct InitDist {
  bool trainable = false;
  std::vector<double> mean;  // trainable mean
  double log_var = 0.0;      // trainable shared log-variance
  InitRule frozen;           // used when !trainable

  static InitDist frozen_rule(InitRule rule) {
    InitDist d;
    d.trainable = false;
    d.frozen = std::move(rule);
    return d;
  }
  static InitDist trainable_gaussian(std::vector<double> mean, double log_var) {
    InitDist d;
    d.trainable = true;
    d.mean = std::move(mean);
    d.log_var = log_var;
    return d;
  }
};

struct ModelParams {
  Mlp mlp;
  InitDist init;
};

// Composed model drift s_theta = sigma_t f_theta + eta (Eq.-(11)-style):
// constrained coordinates take the Omega-drift, real coordinates take the
// baseline drift (alpha z, zero for Brownian).
std::vector<double> model_drift(const ModelParams& params, const BridgeSpec& spec,
                                const std::vector<double>& z, double t);
// Variant reusing caller workspaces (hot path in training/sampling).
void model_drift(const ModelParams& params, const BridgeSpec& spec,
                 const std::vector<double>& z, double t, MlpWorkspace& ws,
                 std::vector<double>& out);

// Sample Z_0 ~ P_0 of the model. Frozen SMLD means N(0, beta_T I).
std::vector<double> model_init_sample(const ModelParams& params,
                                      const BridgeSpec& spec, Rng& rng);

// -log p_0(z) of the model init. Throws for degenerate (Delta / zero
// variance) inits, whose density does not exist.
double model_init_neg_log_density(const ModelParams& params,
                                  const BridgeSpec& spec,
                                  const std::vector<double>& z);

struct InitGrad {
  std::vector<double> mean;
  double log_var = 0.0;
};

// Gradient of -log p_0(z) w.r.t. the trainable init parameters.
InitGrad init_neg_log_density_grad(const InitDist& init, const std::vector<double>& z);

// Flat binary serialization: magic, version, dims, init block, then
// little-endian 64-bit weights.
void save_params(const ModelParams& params, const std::string& path);
ModelParams load_params(const std::string& path);

}  // namespace bridgekit
