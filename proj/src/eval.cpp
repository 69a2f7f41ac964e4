#include "bridgekit/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "bridgekit/gauss.hpp"
#include "bridgekit/parallel.hpp"

namespace bridgekit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clampd(double v, double cap) { return std::clamp(v, -cap, cap); }

// log Gaussian mass of (lo, hi) under N(mean, var); bounds may be infinite.
double log_gauss_mass(double lo, double hi, double mean, double var) {
  const double s = std::sqrt(var);
  if (lo == -kInf && hi == kInf) return 0.0;
  if (lo == -kInf) return gauss::log_cdf((hi - mean) / s);
  if (hi == kInf) return gauss::log_sf((lo - mean) / s);
  return gauss::log_cdf_diff((lo - mean) / s, (hi - mean) / s);
}

// Rounding cell of atom index k: midpoints to the neighbors, outermost cells
// extend to +-inf. Matches project's nearest-atom rule.
std::pair<double, double> rounding_cell(const std::vector<double>& atoms,
                                        std::size_t k) {
  const double lo = (k == 0) ? -kInf : 0.5 * (atoms[k - 1] + atoms[k]);
  const double hi =
      (k + 1 == atoms.size()) ? kInf : 0.5 * (atoms[k] + atoms[k + 1]);
  return {lo, hi};
}

double log_terminal_factor(const DomainComponent& comp, double x, double mean,
                           double var) {
  if (comp.is_real()) return gauss::log_pdf(x, mean, var);
  if (comp.is_interval()) {
    const auto& iv = comp.as_interval();
    // Clamping sends each exterior tail onto the matching boundary point.
    if (x == iv.lower) return log_gauss_mass(-kInf, iv.lower, mean, var);
    if (x == iv.upper) return log_gauss_mass(iv.upper, kInf, mean, var);
    return gauss::log_pdf(x, mean, var);
  }
  const auto& atoms = comp.as_finite().atoms;
  const auto it = std::ranges::lower_bound(atoms, x);
  if (it == atoms.end() || *it != x)
    throw std::invalid_argument("likelihood: x is not an atom of the domain");
  const auto [lo, hi] =
      rounding_cell(atoms, static_cast<std::size_t>(it - atoms.begin()));
  return log_gauss_mass(lo, hi, mean, var);
}

bool init_is_degenerate(const InitRule& rule) {
  return rule.kind == InitKind::Delta ||
         (rule.kind == InitKind::Gaussian && rule.var == 0.0);
}

double bridge_init_log_density(const InitRule& rule, const std::vector<double>& x,
                               const Schedule& sched, const std::vector<double>& z0) {
  double acc = 0.0;
  if (rule.kind == InitKind::Smld) {
    const double v = beta(sched, sched.horizon);
    for (std::size_t i = 0; i < z0.size(); ++i)
      acc += gauss::log_pdf(z0[i], x[i], v);
    return acc;
  }
  // Gaussian with positive variance (degenerate inits never reach here).
  for (std::size_t i = 0; i < z0.size(); ++i)
    acc += gauss::log_pdf(z0[i], rule.point[i], rule.var);
  return acc;
}

}  // namespace

double detail::log_importance_weight(
    const DriftFn& model_drift_fn,
    const std::function<double(const std::vector<double>&)>& model_init_nld_fn,
    bool init_log_ratio_cancels, const BridgeSpec& spec,
    const std::vector<double>& x, const TimeGrid& grid, Rng& rng,
    double drift_clamp) {
  const Schedule& sched = spec.base.schedule;
  const std::size_t k_steps = grid.steps();

  std::vector<double> z = init_sample(spec.init, x, sched, rng);
  double log_w = 0.0;
  if (!init_log_ratio_cancels) {
    if (init_is_degenerate(spec.init))
      throw std::invalid_argument(
          "likelihood: degenerate bridge init requires a frozen matching model init");
    log_w = -model_init_nld_fn(z) -
            bridge_init_log_density(spec.init, x, sched, z);
  }

  std::vector<double> model_mu, xi(z.size());
  for (std::size_t k = 0; k + 1 < k_steps; ++k) {
    const double t = grid.knots[k];
    const double eps = grid.step_size(k);
    const double var = eps * sigma_k_sq(sched, grid, k);
    auto q_drift = h_transform_drift(spec.base, x, z, t);
    model_drift_fn(z, t, model_mu);
    std::vector<double> next(z.size());
    const double s = std::sqrt(var);
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double qd = clampd(q_drift[i], drift_clamp);
      next[i] = z[i] + eps * qd + s * rng.normal();
      const double m_model = z[i] + eps * clampd(model_mu[i], drift_clamp);
      log_w += gauss::log_pdf(next[i], m_model, var) -
               gauss::log_pdf(next[i], z[i] + eps * qd, var);
    }
    z = std::move(next);
  }

  // Terminal factor: model density/mass of the observed x given Z_{t_K}.
  const std::size_t last = k_steps - 1;
  const double t = grid.knots[last];
  const double eps = grid.step_size(last);
  const double var = eps * sigma_k_sq(sched, grid, last);
  model_drift_fn(z, t, model_mu);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double mean = z[i] + eps * clampd(model_mu[i], drift_clamp);
    log_w += log_terminal_factor(spec.domain.components[i], x[i], mean, var);
  }
  return log_w;
}

BoundEstimate detail::iwbo_with_drift(
    const DriftFn& drift_fn,
    const std::function<double(const std::vector<double>&)>& init_nld_fn,
    bool init_log_ratio_cancels, const BridgeSpec& spec,
    const std::vector<double>& x, const TimeGrid& grid, std::size_t n_mc,
    std::size_t k_importance, Rng& rng, double drift_clamp) {
  if (n_mc < 1) throw std::invalid_argument("iwbo: n_mc >= 1");
  if (k_importance < 1) throw std::invalid_argument("iwbo: k_importance >= 1");
  BoundEstimate est;
  double sum = 0.0, sum_sq = 0.0;
  std::vector<double> lw(k_importance);
  for (std::size_t r = 0; r < n_mc; ++r) {
    double max_lw = -kInf;
    for (std::size_t j = 0; j < k_importance; ++j) {
      lw[j] = log_importance_weight(drift_fn, init_nld_fn, init_log_ratio_cancels,
                                    spec, x, grid, rng, drift_clamp);
      max_lw = std::max(max_lw, lw[j]);
    }
    double rep;
    if (max_lw == -kInf) {
      est.underflow = true;
      rep = kInf;
    } else {
      double acc = 0.0;
      for (double v : lw) acc += std::exp(v - max_lw);
      rep = -(max_lw + std::log(acc) -
              std::log(static_cast<double>(k_importance)));
    }
    sum += rep;
    sum_sq += rep * rep;
  }
  const double n = static_cast<double>(n_mc);
  est.value = sum / n;
  if (n_mc > 1 && std::isfinite(est.value)) {
    const double var = std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0));
    est.std_err = std::sqrt(var / n);
  }
  return est;
}

namespace {

detail::DriftFn make_model_drift_fn(const ModelParams& params,
                                    const BridgeSpec& spec) {
  auto ws = std::make_shared<MlpWorkspace>();
  return [&params, &spec, ws](const std::vector<double>& z, double t,
                              std::vector<double>& out) {
    model_drift(params, spec, z, t, *ws, out);
  };
}

bool model_init_matches_degenerate(const ModelParams& params,
                                   const BridgeSpec& spec) {
  if (!init_is_degenerate(spec.init)) return false;
  if (params.init.trainable) return false;
  const InitRule& m = params.init.frozen;
  if (!init_is_degenerate(m)) return false;
  return m.point == spec.init.point;
}

BoundEstimate bound_impl(const ModelParams& params, const BridgeSpec& spec,
                         const std::vector<double>& x, const TimeGrid& grid,
                         std::size_t n_mc, std::size_t k_importance, Rng& rng,
                         double drift_clamp) {
  const bool cancels = model_init_matches_degenerate(params, spec);
  if (init_is_degenerate(spec.init) && !cancels)
    throw std::invalid_argument(
        "likelihood: degenerate bridge init requires a frozen matching model init");
  auto nld = [&](const std::vector<double>& z) {
    return model_init_neg_log_density(params, spec, z);
  };
  return detail::iwbo_with_drift(make_model_drift_fn(params, spec), nld, cancels,
                                 spec, x, grid, n_mc, k_importance, rng,
                                 drift_clamp);
}

}  // namespace

BoundEstimate elbo(const ModelParams& params, const BridgeSpec& spec,
                   const std::vector<double>& x, const TimeGrid& grid,
                   std::size_t n_mc, Rng& rng, double drift_clamp) {
  return bound_impl(params, spec, x, grid, n_mc, 1, rng, drift_clamp);
}

BoundEstimate iwbo(const ModelParams& params, const BridgeSpec& spec,
                   const std::vector<double>& x, const TimeGrid& grid,
                   std::size_t n_mc, std::size_t k_importance, Rng& rng,
                   double drift_clamp) {
  return bound_impl(params, spec, x, grid, n_mc, k_importance, rng, drift_clamp);
}

std::vector<double> exact_terminal_pmf(const ModelParams& params,
                                       const BridgeSpec& spec,
                                       const TimeGrid& grid,
                                       std::size_t n_samples,
                                       std::uint64_t seed) {
  if (!spec.domain.all_finite())
    throw std::invalid_argument("exact_terminal_pmf: domain must be fully finite");
  if (n_samples < 1)
    throw std::invalid_argument("exact_terminal_pmf: n_samples >= 1");
  const auto atoms = enumerate_atoms(spec.domain);
  std::vector<std::size_t> sampled(n_samples);
  parallel_for(n_samples, [&](std::size_t i) {
    Rng rng = make_stream(seed, "pmf-sample", i);
    const auto z = sample_model(params, spec, grid, rng);
    sampled[i] = atom_index(spec.domain, z);
  });
  std::vector<double> pmf(atoms.size(), 0.0);
  for (std::size_t idx : sampled) pmf[idx] += 1.0;
  for (auto& p : pmf) p /= static_cast<double>(n_samples);
  return pmf;
}

double kl_to_target(const std::vector<double>& pmf,
                    const std::vector<double>& target) {
  if (pmf.size() != target.size())
    throw std::invalid_argument("kl_to_target: mismatched atom sets");
  double acc = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i] <= 0.0) continue;
    if (pmf[i] <= 0.0) return kInf;
    acc += target[i] * std::log(target[i] / pmf[i]);
  }
  return std::max(0.0, acc);
}

double kl_to_target_smoothed(const std::vector<double>& pmf,
                             const std::vector<double>& target,
                             std::size_t n_samples) {
  if (n_samples < 1) throw std::invalid_argument("kl smoothing: n_samples >= 1");
  const double delta = 0.5 / static_cast<double>(n_samples);
  std::vector<double> smoothed(pmf.size());
  double total = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    smoothed[i] = pmf[i] + delta;
    total += smoothed[i];
  }
  for (auto& p : smoothed) p /= total;
  return kl_to_target(smoothed, target);
}

std::vector<RateRow> rate_experiment(const RateConfig& cfg) {
  const Domain& domain = cfg.spec.domain;
  if (domain.dim() != 1 || !domain.all_finite())
    throw std::invalid_argument("rate_experiment: need a 1-D finite domain");
  const auto& atoms = domain.components[0].as_finite().atoms;
  if (cfg.target_pmf.size() != atoms.size())
    throw std::invalid_argument("rate_experiment: target pmf size mismatch");
  if (cfg.n_list.empty() || cfg.eps_list.empty() || cfg.seeds.empty())
    throw std::invalid_argument("rate_experiment: empty sweep axis");
  for (std::size_t n : cfg.n_list) {
    if (n == 0) throw std::invalid_argument("rate_experiment: n must be >= 1");
  }

  std::vector<double> cdf(atoms.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    acc += cfg.target_pmf[i];
    cdf[i] = acc;
  }

  const double horizon = cfg.spec.base.schedule.horizon;
  std::vector<RateRow> rows;
  for (std::size_t n : cfg.n_list) {
    for (double eps : cfg.eps_list) {
      for (std::uint64_t seed : cfg.seeds) {
        // Fixed dataset: first n draws of the per-seed data stream, so
        // growing n extends rather than reshuffles the data.
        Rng data_rng = make_stream(seed, "rate-data");
        std::vector<std::vector<double>> dataset(n);
        for (auto& x : dataset) {
          const double u = data_rng.uniform();
          const auto it = std::ranges::lower_bound(cdf, u);
          const std::size_t idx =
              std::min(static_cast<std::size_t>(it - cdf.begin()), atoms.size() - 1);
          x = {atoms[idx]};
        }
        TrainConfig tc = cfg.train;
        tc.seed = seed;
        tc.grid_steps =
            static_cast<std::size_t>(std::llround(horizon / eps));
        const TrainResult trained = train(dataset, cfg.spec, tc);
        const TimeGrid grid = TimeGrid::uniform(tc.grid_steps, horizon);
        const auto pmf =
            exact_terminal_pmf(trained.params, cfg.spec, grid, cfg.n_eval_samples,
                               derive_stream(seed, "rate-eval", 0));
        rows.push_back({n, eps, seed, kl_to_target(pmf, cfg.target_pmf),
                        kl_to_target_smoothed(pmf, cfg.target_pmf,
                                              cfg.n_eval_samples)});
      }
    }
  }
  return rows;
}

}  // namespace bridgekit
