#include "bridgekit/sde.hpp"

#include <algorithm>
#include <cmath>

namespace bridgekit {
namespace {

void clamp_drift(std::vector<double>& drift, double cap) {
  for (auto& v : drift) v = std::clamp(v, -cap, cap);
}

bool all_finite(const std::vector<double>& v) {
  return std::ranges::all_of(v, [](double x) { return std::isfinite(x); });
}

Path simulate_bridge(const BridgeSpec& spec, const std::vector<double>& x,
                     const TimeGrid& grid, Rng& rng, double drift_clamp,
                     bool pin_terminal) {
  Path path;
  path.grid = grid;
  path.endpoint = x;
  path.states.reserve(grid.knots.size());
  path.states.push_back(init_sample(spec.init, x, spec.base.schedule, rng));
  std::vector<double> xi(x.size());
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double t = grid.knots[k];
    const double eps = grid.step_size(k);
    auto drift = h_transform_drift(spec.base, x, path.states.back(), t);
    clamp_drift(drift, drift_clamp);
    const double sigma = std::sqrt(sigma_k_sq(spec.base.schedule, grid, k));
    for (auto& v : xi) v = rng.normal();
    path.states.push_back(euler_step(path.states.back(), drift, eps, sigma, xi));
  }
  if (pin_terminal) path.states.back() = x;
  return path;
}

}  // namespace

std::vector<double> euler_step(const std::vector<double>& z,
                               const std::vector<double>& drift, double eps,
                               double sigma, const std::vector<double>& xi) {
  if (!(eps > 0.0)) throw std::invalid_argument("euler_step: eps must be positive");
  if (drift.size() != z.size() || xi.size() != z.size())
    throw std::invalid_argument("euler_step: dimension mismatch");
  const double noise_scale = std::sqrt(eps) * sigma;
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    out[i] = z[i] + eps * drift[i] + noise_scale * xi[i];
  return out;
}

Path sample_bridge_path(const BridgeSpec& spec, const std::vector<double>& x,
                        const TimeGrid& grid, Rng& rng, double drift_clamp) {
  return simulate_bridge(spec, x, grid, rng, drift_clamp, true);
}

Path sample_bridge_path_unpinned(const BridgeSpec& spec, const std::vector<double>& x,
                                 const TimeGrid& grid, Rng& rng, double drift_clamp) {
  return simulate_bridge(spec, x, grid, rng, drift_clamp, false);
}

std::vector<double> sample_model(const ModelParams& params, const BridgeSpec& spec,
                                 const TimeGrid& grid, Rng& rng, double drift_clamp) {
  std::vector<double> z = model_init_sample(params, spec, rng);
  MlpWorkspace ws;
  std::vector<double> drift, xi(z.size());
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double t = grid.knots[k];
    const double eps = grid.step_size(k);
    model_drift(params, spec, z, t, ws, drift);
    clamp_drift(drift, drift_clamp);
    const double sigma = std::sqrt(sigma_k_sq(spec.base.schedule, grid, k));
    for (auto& v : xi) v = rng.normal();
    z = euler_step(z, drift, eps, sigma, xi);
    if (!all_finite(z))
      throw NumericalDivergence(k, "sample_model: non-finite state at step " +
                                       std::to_string(k));
  }
  return project(spec.domain, z);
}

}  // namespace bridgekit
