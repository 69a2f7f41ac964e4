#pragma once

#include <stdexcept>
#include <vector>

#include "bridgekit/bridges.hpp"
#include "bridgekit/nn.hpp"
#include "bridgekit/time_grid.hpp"

namespace bridgekit {

// A trajectory on a time grid. For bridge paths the recorded terminal state
// is pinned to the conditioning endpoint x exactly (the drift is singular at
// the horizon and the loss never evaluates there).
struct Path {
  TimeGrid grid;
  std::vector<std::vector<double>> states;  // K+1 points
  std::vector<double> endpoint;             // conditioning x for bridge paths
};

class NumericalDivergence : public std::runtime_error {
 public:
  NumericalDivergence(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

// One Euler-Maruyama update: z + eps * drift + sqrt(eps) * sigma * xi.
std::vector<double> euler_step(const std::vector<double>& z,
                               const std::vector<double>& drift, double eps,
                               double sigma, const std::vector<double>& xi);

// Per-coordinate drift magnitude cap applied before stepping; converts
// near-horizon blowups into a diagnosable clamp instead of NaNs.
inline constexpr double kDefaultDriftClamp = 1e6;

// Simulate Z ~ Q^x by Euler steps on the x-bridge drift; Z_0 from the init
// rule, terminal state pinned to x.
Path sample_bridge_path(const BridgeSpec& spec, const std::vector<double>& x,
                        const TimeGrid& grid, Rng& rng,
                        double drift_clamp = kDefaultDriftClamp);

// Variant without the terminal pinning: the last state is the raw Euler
// output (used by the hitting-error checks).
Path sample_bridge_path_unpinned(const BridgeSpec& spec, const std::vector<double>& x,
                                 const TimeGrid& grid, Rng& rng,
                                 double drift_clamp = kDefaultDriftClamp);

// Draw one sample from the trained model: init from P_0, Euler steps with
// the model drift and interval-averaged noise, terminal projection onto the
// domain. Throws NumericalDivergence on non-finite states.
std::vector<double> sample_model(const ModelParams& params, const BridgeSpec& spec,
                                 const TimeGrid& grid, Rng& rng,
                                 double drift_clamp = kDefaultDriftClamp);

}  // namespace bridgekit
