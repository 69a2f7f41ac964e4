#include "bridgekit/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace bridgekit {
namespace {

thread_local double g_max_eval_t = -1.0;

std::size_t find_knot(const TimeGrid& grid, double t) {
  const auto it = std::ranges::lower_bound(grid.knots, t);
  if (it == grid.knots.end() || *it != t)
    throw std::invalid_argument("residual: t is not a grid knot");
  return static_cast<std::size_t>(it - grid.knots.begin());
}

// r = f_theta + (eta_model_baseline - eta^x) / sigma_t, so that
// Delta = ||r||^2 and d(Delta/2)/df = r.
void residual_vector(const ModelParams& params, const BridgeSpec& spec,
                     const Path& path, std::size_t knot, MlpWorkspace& ws,
                     std::vector<double>& r) {
  const Schedule& sched = spec.base.schedule;
  const double t = path.grid.knots[knot];
  if (knot >= path.grid.steps())
    throw std::invalid_argument("residual: endpoint t = T is excluded");
  g_max_eval_t = std::max(g_max_eval_t, t);
  const double sig = std::sqrt(sigma_sq(sched, t));
  if (!(sig > 0.0)) throw std::domain_error("residual: sigma_t must be positive");
  const auto& z = path.states[knot];
  const auto f = mlp_forward(params.mlp, z, t, sched.horizon, ws);
  const auto eta_x = h_transform_drift(spec.base, path.endpoint, z, t);
  r.resize(z.size());
  if (spec.domain.has_constrained()) {
    const auto eta = omega_drift(spec.domain, z, t, sched);
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double baseline = spec.domain.components[i].is_real()
                                  ? spec.base.ou_rate * z[i]
                                  : eta[i];
      r[i] = f[i] + (baseline - eta_x[i]) / sig;
    }
  } else {
    for (std::size_t i = 0; i < z.size(); ++i)
      r[i] = f[i] + (spec.base.ou_rate * z[i] - eta_x[i]) / sig;
  }
}

struct AdamState {
  std::vector<double> m, v;
  std::size_t step = 0;
};

void apply_update(std::vector<double>& params, const std::vector<double>& grad,
                  const TrainConfig& cfg, double lr, AdamState& adam) {
  if (cfg.optimizer == Optimizer::Sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
    return;
  }
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  if (adam.m.empty()) {
    adam.m.assign(params.size(), 0.0);
    adam.v.assign(params.size(), 0.0);
  }
  ++adam.step;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(adam.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(adam.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    adam.m[i] = b1 * adam.m[i] + (1.0 - b1) * grad[i];
    adam.v[i] = b2 * adam.v[i] + (1.0 - b2) * grad[i] * grad[i];
    params[i] -= lr * (adam.m[i] / c1) / (std::sqrt(adam.v[i] / c2) + eps);
  }
}

}  // namespace

double max_residual_eval_time() { return g_max_eval_t; }
void reset_max_residual_eval_time() { g_max_eval_t = -1.0; }

double pointwise_residual(const ModelParams& params, const BridgeSpec& spec,
                          const Path& path, double t) {
  const std::size_t knot = find_knot(path.grid, t);
  MlpWorkspace ws;
  std::vector<double> r;
  residual_vector(params, spec, path, knot, ws, r);
  double acc = 0.0;
  for (double v : r) acc += v * v;
  return acc;
}

double trajectory_loss(const ModelParams& params, const BridgeSpec& spec,
                       const Path& path, bool freeze_init) {
  const std::size_t k_steps = path.grid.steps();
  MlpWorkspace ws;
  std::vector<double> r;
  double acc = 0.0;
  for (std::size_t k = 0; k < k_steps; ++k) {
    residual_vector(params, spec, path, k, ws, r);
    for (double v : r) acc += v * v;
  }
  double loss = acc / (2.0 * static_cast<double>(k_steps));
  if (!freeze_init)
    loss += model_init_neg_log_density(params, spec, path.states.front());
  return loss;
}

ModelParams make_initial_params(const BridgeSpec& spec, const TrainConfig& cfg) {
  MlpArchitecture arch;
  arch.dim = spec.domain.dim();
  arch.hidden_layers = cfg.hidden_layers;
  arch.width = cfg.width;
  Rng rng = make_stream(cfg.seed, "mlp-init");
  ModelParams params{Mlp::random(arch, rng), InitDist{}};
  if (cfg.freeze_init) {
    params.init = InitDist::frozen_rule(spec.init);
  } else {
    params.init = InitDist::trainable_gaussian(
        std::vector<double>(spec.domain.dim(), 0.0), 0.0);
  }
  return params;
}

TrainResult train(const std::vector<std::vector<double>>& dataset,
                  const BridgeSpec& spec, const TrainConfig& cfg) {
  if (dataset.empty()) throw std::invalid_argument("train: dataset is empty");
  if (cfg.grid_steps < 2) throw std::invalid_argument("train: K must be >= 2");
  if (cfg.batch_size < 1) throw std::invalid_argument("train: batch_size >= 1");
  for (const auto& x : dataset) {
    if (x.size() != spec.domain.dim())
      throw std::invalid_argument("train: data point dimension mismatch");
  }

  const TimeGrid grid = TimeGrid::uniform(cfg.grid_steps, spec.base.schedule.horizon);
  const std::size_t k_steps = grid.steps();
  TrainResult result{make_initial_params(spec, cfg), {}};
  ModelParams& params = result.params;

  const std::size_t n_mlp = params.mlp.params.size();
  const std::size_t n_init = params.init.trainable ? spec.domain.dim() + 1 : 0;
  std::vector<double> grad(n_mlp + n_init);

  AdamState adam;
  Rng batch_rng = make_stream(cfg.seed, "batch");
  Rng time_rng = make_stream(cfg.seed, "time");
  std::uint64_t sample_counter = 0;
  MlpWorkspace ws, scratch;
  std::vector<double> r;

  const std::size_t steps_per_epoch =
      cfg.steps_per_epoch ? cfg.steps_per_epoch
                          : (dataset.size() + cfg.batch_size - 1) / cfg.batch_size;

  for (std::size_t epoch = 0; epoch < cfg.n_epochs; ++epoch) {
    const auto t_start = std::chrono::steady_clock::now();
    const double lr = cfg.learning_rate / (1.0 + cfg.lr_decay * static_cast<double>(epoch));
    double epoch_loss = 0.0;
    std::size_t epoch_samples = 0;

    for (std::size_t step = 0; step < steps_per_epoch; ++step) {
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_loss = 0.0;

      for (std::size_t b = 0; b < cfg.batch_size; ++b) {
        const auto& x = dataset[batch_rng.uniform_index(dataset.size())];
        Rng path_rng = make_stream(cfg.seed, "path", sample_counter++);
        const Path path =
            sample_bridge_path(spec, x, grid, path_rng, cfg.drift_clamp);

        double sample_loss = 0.0;
        if (cfg.time_sampling == TimeSampling::IidUniform) {
          // Single interior knot: unbiased estimate of (1/2K) sum_k Delta_k.
          const std::size_t knot = time_rng.uniform_index(k_steps);
          residual_vector(params, spec, path, knot, ws, r);
          for (double v : r) sample_loss += 0.5 * v * v;
          mlp_backward(params.mlp, ws, r, grad, scratch);
        } else {
          std::vector<double> r_scaled;
          for (std::size_t k = 0; k < k_steps; ++k) {
            residual_vector(params, spec, path, k, ws, r);
            for (double v : r) sample_loss += v * v;
            r_scaled.resize(r.size());
            for (std::size_t i = 0; i < r.size(); ++i)
              r_scaled[i] = r[i] / static_cast<double>(k_steps);
            mlp_backward(params.mlp, ws, r_scaled, grad, scratch);
          }
          sample_loss /= 2.0 * static_cast<double>(k_steps);
        }

        if (params.init.trainable) {
          sample_loss +=
              model_init_neg_log_density(params, spec, path.states.front());
          const InitGrad ig =
              init_neg_log_density_grad(params.init, path.states.front());
          for (std::size_t i = 0; i < ig.mean.size(); ++i)
            grad[n_mlp + i] += ig.mean[i];
          grad[n_mlp + ig.mean.size()] += ig.log_var;
        }
        batch_loss += sample_loss;
      }

      const double inv_batch = 1.0 / static_cast<double>(cfg.batch_size);
      for (auto& g : grad) g *= inv_batch;
      batch_loss *= inv_batch;
      if (!std::isfinite(batch_loss))
        throw NumericalDivergence(
            epoch, "train: NaN loss at epoch " + std::to_string(epoch) +
                       ", sample counter " + std::to_string(sample_counter));
      epoch_loss += batch_loss;
      ++epoch_samples;

      if (params.init.trainable) {
        // One flat update across MLP and init parameters.
        std::vector<double> flat(params.mlp.params);
        flat.insert(flat.end(), params.init.mean.begin(), params.init.mean.end());
        flat.push_back(params.init.log_var);
        apply_update(flat, grad, cfg, lr, adam);
        std::copy(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(n_mlp),
                  params.mlp.params.begin());
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(n_mlp),
                  flat.end() - 1, params.init.mean.begin());
        params.init.log_var = flat.back();
      } else {
        apply_update(params.mlp.params, grad, cfg, lr, adam);
      }
    }

    const auto t_end = std::chrono::steady_clock::now();
    const double wall_ms =
        std::chrono::duration<double, std::milli>(t_end - t_start).count();
    result.trace.push_back(
        {epoch, epoch_loss / static_cast<double>(epoch_samples), wall_ms});
  }
  return result;
}

}  // namespace bridgekit
