#pragma once

#include <vector>

#include "bridgekit/domains.hpp"
#include "bridgekit/rng.hpp"
#include "bridgekit/schedules.hpp"

namespace bridgekit {

// Baseline process Q: dZ_t = alpha Z_t dt + sigma_t dW_t with constant rate
// alpha (alpha = 0 is Brownian / variance-exploding, alpha = sigma_t^2/2 is
// the variance-preserving coupling, exposed as the "vp" preset at constant
// schedules).
struct BaselineQ {
  double ou_rate = 0.0;  // alpha; 0 means Brownian
  Schedule schedule;

  bool is_brownian() const { return ou_rate == 0.0; }
};

// Closed-form transition statistics of the linear baseline:
//   alpha_{T|t} = exp(alpha (T - t))
//   beta_{T|t}  = int_t^T alpha_{T|r}^2 sigma_r^2 dr
double ou_alpha_horizon(const BaselineQ& base, double t);
double ou_beta_horizon(const BaselineQ& base, double t);

enum class InitKind { Smld, Delta, Gaussian };

// Initialization rule for the bridge Q^x (and, frozen, for the model's P_0).
struct InitRule {
  InitKind kind = InitKind::Delta;
  std::vector<double> point;  // Delta location / Gaussian mean
  double var = 0.0;           // Gaussian variance (shared across coordinates)

  static InitRule smld() { return {InitKind::Smld, {}, 0.0}; }
  static InitRule delta(std::vector<double> z0) {
    return {InitKind::Delta, std::move(z0), 0.0};
  }
  static InitRule gaussian(std::vector<double> mu0, double v0);
};

struct BridgeSpec {
  BaselineQ base;
  InitRule init;
  Domain domain;
};

// Brownian-bridge drift sigma_t^2 (x - z) / (beta_T - beta_t). Throws at
// t >= T where the drift is singular.
std::vector<double> bb_drift(const std::vector<double>& x,
                             const std::vector<double>& z, double t,
                             const Schedule& schedule);

// Doob h-transform drift of the linear baseline toward terminal value x:
//   alpha z + sigma_t^2 alpha_{T|t} (x - alpha_{T|t} z) / beta_{T|t}
// Reduces exactly to bb_drift for alpha = 0.
std::vector<double> h_transform_drift(const BaselineQ& base,
                                      const std::vector<double>& x,
                                      const std::vector<double>& z, double t);

// Draw Z_0 for the bridge Q^x. SMLD draws N(x, beta_T I); Delta returns the
// stored point; Gaussian draws N(mu0, v0 I).
std::vector<double> init_sample(const InitRule& rule, const std::vector<double>& x,
                                const Schedule& schedule, Rng& rng);

// Markovianized optimal drift for a discrete target under the standard
// Brownian bridge from Delta(z0) with a constant schedule:
//   s*(z, t) = (E[x | Z_t = z] - z) / (T - t),
// posterior over atoms computed in log space.
double optimal_drift_oracle(const std::vector<double>& atoms,
                            const std::vector<double>& pmf, double z, double t,
                            double z0, const Schedule& schedule);

}  // namespace bridgekit
