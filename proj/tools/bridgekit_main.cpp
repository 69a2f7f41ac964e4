// bridgekit: experiment front-end for diffusion-bridge generative models.
//
// Subcommands: train / sample / eval / rate / selftest. Exit codes:
//   0 success, 2 config validation, 3 numerical divergence, 4 I/O.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "bridgekit/config.hpp"
#include "bridgekit/csv.hpp"
#include "bridgekit/eval.hpp"
#include "bridgekit/kernels.hpp"
#include "bridgekit/parallel.hpp"
#include "bridgekit/plot.hpp"
#include "bridgekit/sde.hpp"

namespace fs = std::filesystem;
using namespace bridgekit;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output dir: " + dir);
}

void echo_config(const ExperimentConfig& cfg) {
  std::ofstream out(cfg.output_dir + "/config_echo.json");
  if (!out) throw IoError("cannot write config echo");
  out << cfg.normalized_json();
}

std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stoull(cell));
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

int cmd_train(const std::string& config_path) {
  ExperimentConfig cfg = load_config(config_path);
  ensure_dir(cfg.output_dir);
  echo_config(cfg);
  const auto dataset = make_dataset(cfg);
  const TrainResult result = train(dataset, cfg.spec, cfg.train);
  save_params(result.params, cfg.output_dir + "/params.bin");

  CsvWriter trace(cfg.output_dir + "/loss_trace.csv",
                  {"epoch", "mean_loss", "wall_ms"});
  std::vector<std::vector<double>> curve;
  for (const auto& row : result.trace) {
    trace.cell(row.epoch).cell(row.mean_loss).cell(row.wall_ms);
    trace.end_row();
    curve.push_back({static_cast<double>(row.epoch), row.mean_loss});
  }
  trace.close();
  emit_plot_data(curve, PlotKind::LossCurve, cfg.output_dir);
  std::cout << "trained " << cfg.train.n_epochs << " epochs; final loss "
            << result.trace.back().mean_loss << "\n";
  return 0;
}

int cmd_sample(const std::string& config_path, const std::string& params_path,
               std::size_t n, bool trajectories) {
  ExperimentConfig cfg = load_config(config_path);
  ensure_dir(cfg.output_dir);
  const ModelParams params = load_params(params_path);
  const TimeGrid grid =
      TimeGrid::uniform(cfg.grid_steps, cfg.spec.base.schedule.horizon);

  const std::size_t dim = cfg.spec.domain.dim();
  std::vector<std::string> cols;
  for (std::size_t i = 0; i < dim; ++i) cols.push_back("x" + std::to_string(i));
  std::vector<std::vector<double>> samples(n);
  parallel_for(n, [&](std::size_t i) {
    Rng rng = make_stream(cfg.seed, "cli-sample", i);
    samples[i] = sample_model(params, cfg.spec, grid, rng, cfg.train.drift_clamp);
  });
  CsvWriter csv(cfg.output_dir + "/samples.csv", cols);
  for (const auto& s : samples) {
    for (double v : s) csv.cell(v);
    csv.end_row();
  }
  csv.close();

  if (trajectories && dim == 1) {
    // Long-format bundle of a few full sampling trajectories.
    std::vector<std::vector<double>> rows;
    const std::size_t n_paths = std::min<std::size_t>(n, 20);
    for (std::size_t p = 0; p < n_paths; ++p) {
      Rng rng = make_stream(cfg.seed, "cli-trajectory", p);
      std::vector<double> z = model_init_sample(params, cfg.spec, rng);
      MlpWorkspace ws;
      std::vector<double> drift, xi(z.size());
      rows.push_back({static_cast<double>(p), 0.0, z[0]});
      for (std::size_t k = 0; k < grid.steps(); ++k) {
        model_drift(params, cfg.spec, z, grid.knots[k], ws, drift);
        for (auto& d : drift)
          d = std::clamp(d, -cfg.train.drift_clamp, cfg.train.drift_clamp);
        for (auto& v : xi) v = rng.normal();
        z = euler_step(z, drift, grid.step_size(k),
                       std::sqrt(sigma_k_sq(cfg.spec.base.schedule, grid, k)), xi);
        rows.push_back({static_cast<double>(p), grid.knots[k + 1], z[0]});
      }
    }
    emit_plot_data(rows, PlotKind::TrajectoryBundle, cfg.output_dir);
  }
  std::cout << "wrote " << n << " samples\n";
  return 0;
}

int cmd_eval(const std::string& config_path, const std::string& params_path,
             long n_mc, long k_importance, bool exact_kl_flag) {
  ExperimentConfig cfg = load_config(config_path);
  ensure_dir(cfg.output_dir);
  const ModelParams params = load_params(params_path);
  const TimeGrid grid =
      TimeGrid::uniform(cfg.grid_steps, cfg.spec.base.schedule.horizon);
  const std::size_t n_mc_eff = n_mc > 0 ? static_cast<std::size_t>(n_mc) : cfg.eval.n_mc;
  const std::size_t k_eff =
      k_importance > 0 ? static_cast<std::size_t>(k_importance) : cfg.eval.k_importance;
  const bool want_kl = exact_kl_flag || cfg.eval.exact_kl;

  const auto dataset = make_dataset(cfg);
  double elbo_sum = 0.0, iwbo_sum = 0.0, elbo_se_sq = 0.0, iwbo_se_sq = 0.0;
  const std::size_t n_points = dataset.size();
  std::vector<BoundEstimate> elbos(n_points), iwbos(n_points);
  parallel_for(n_points, [&](std::size_t i) {
    Rng rng_e = make_stream(cfg.seed, "elbo", i);
    elbos[i] = elbo(params, cfg.spec, dataset[i], grid, n_mc_eff, rng_e,
                    cfg.train.drift_clamp);
    Rng rng_i = make_stream(cfg.seed, "iwbo", i);
    iwbos[i] = iwbo(params, cfg.spec, dataset[i], grid, n_mc_eff, k_eff, rng_i,
                    cfg.train.drift_clamp);
  });
  for (std::size_t i = 0; i < n_points; ++i) {
    elbo_sum += elbos[i].value;
    iwbo_sum += iwbos[i].value;
    elbo_se_sq += elbos[i].std_err * elbos[i].std_err;
    iwbo_se_sq += iwbos[i].std_err * iwbos[i].std_err;
  }
  const double np = static_cast<double>(n_points);
  const double elbo_nats = elbo_sum / np;
  const double iwbo_nats = iwbo_sum / np;
  const double nats_to_bits =
      1.0 / (std::numbers::ln2 * static_cast<double>(cfg.spec.domain.dim()));

  double kl = std::nan(""), kl_smoothed = std::nan("");
  if (want_kl) {
    if (cfg.data.kind != "pmf")
      throw ConfigError("eval.exact_kl requires data.kind = pmf");
    const auto pmf =
        exact_terminal_pmf(params, cfg.spec, grid, cfg.eval.n_samples,
                           derive_stream(cfg.seed, "eval-pmf", 0));
    kl = kl_to_target(pmf, cfg.data.pmf);
    kl_smoothed = kl_to_target_smoothed(pmf, cfg.data.pmf, cfg.eval.n_samples);
    const auto atoms = enumerate_atoms(cfg.spec.domain);
    std::vector<std::vector<double>> bars;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      bars.push_back({atoms[i][0], pmf[i]});
    emit_plot_data(bars, PlotKind::PmfBar, cfg.output_dir);
  }

  CsvWriter csv(cfg.output_dir + "/eval_report.csv",
                {"elbo_nats", "elbo_se", "iwbo_nats", "iwbo_se",
                 "elbo_bits_per_dim", "iwbo_bits_per_dim", "exact_kl",
                 "exact_kl_smoothed", "n_mc", "k_importance", "K", "seed"});
  csv.cell(elbo_nats)
      .cell(std::sqrt(elbo_se_sq) / np)
      .cell(iwbo_nats)
      .cell(std::sqrt(iwbo_se_sq) / np)
      .cell(elbo_nats * nats_to_bits)
      .cell(iwbo_nats * nats_to_bits)
      .cell(kl)
      .cell(kl_smoothed)
      .cell(n_mc_eff)
      .cell(k_eff)
      .cell(cfg.grid_steps)
      .cell(cfg.seed);
  csv.end_row();
  csv.close();
  std::cout << "elbo " << elbo_nats << " nats, iwbo " << iwbo_nats << " nats\n";
  return 0;
}

int cmd_rate(const std::string& config_path, const std::string& n_list,
             const std::string& eps_list, const std::string& seeds) {
  ExperimentConfig cfg = load_config(config_path);
  ensure_dir(cfg.output_dir);
  RateConfig rc;
  rc.spec = cfg.spec;
  rc.train = cfg.train;
  rc.n_eval_samples = cfg.eval.n_samples;
  if (cfg.rate) {
    rc.n_list = cfg.rate->n_list;
    rc.eps_list = cfg.rate->eps_list;
    rc.seeds = cfg.rate->seeds;
    rc.target_pmf = cfg.rate->target_pmf;
  }
  if (!n_list.empty()) rc.n_list = parse_size_list(n_list);
  if (!eps_list.empty()) rc.eps_list = parse_double_list(eps_list);
  if (!seeds.empty()) {
    rc.seeds.clear();
    for (auto v : parse_size_list(seeds)) rc.seeds.push_back(v);
  }
  if (rc.target_pmf.empty() && cfg.data.kind == "pmf") rc.target_pmf = cfg.data.pmf;
  try {
    const auto rows = rate_experiment(rc);
    CsvWriter csv(cfg.output_dir + "/rate_table.csv",
                  {"n", "eps", "seed", "kl", "kl_smoothed"});
    std::vector<std::vector<double>> curve;
    for (const auto& r : rows) {
      csv.cell(r.n).cell(r.eps).cell(r.seed).cell(r.kl).cell(r.kl_smoothed);
      csv.end_row();
      curve.push_back({static_cast<double>(r.n), r.eps,
                       static_cast<double>(r.seed), r.kl, r.kl_smoothed});
    }
    csv.close();
    emit_plot_data(curve, PlotKind::RateCurve, cfg.output_dir);
    std::cout << "rate table: " << rows.size() << " cells\n";
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return 0;
}

int cmd_selftest() {
  bool ok = true;
  auto report = [&](const std::string& name, bool pass) {
    std::cout << (pass ? "PASS " : "FAIL ") << name << "\n";
    ok = ok && pass;
  };

  // Gradient check on a seeded architecture.
  {
    Rng rng = make_stream(7, "selftest-mlp");
    Mlp mlp = Mlp::random({2, 3, 32}, rng);
    const auto rep = grad_check(mlp, 128, 1e-5, rng);
    report("grad_check (max rel err " + std::to_string(rep.max_rel_err) + ")",
           rep.pass);
  }

  // d beta / dt == sigma_t^2 by central differences, all schedule kinds.
  {
    const std::vector<Schedule> schedules = {
        Schedule::constant(1.0), Schedule::decay_a(3.0, 3.0),
        Schedule::decay_b(3.0), Schedule::decay_c(3.0, 3.0)};
    Rng rng = make_stream(7, "selftest-sched");
    bool pass = true;
    const double h = 1e-5;
    for (const auto& s : schedules) {
      for (int i = 0; i < 100; ++i) {
        const double t = rng.uniform(h, s.horizon - h);
        const double fd = (beta(s, t + h) - beta(s, t - h)) / (2.0 * h);
        if (std::abs(fd - sigma_sq(s, t)) > 1e-6) pass = false;
      }
    }
    report("schedule beta derivative", pass);
  }

  // Omega-drift equals sigma^2 d/dz log-partition by finite differences.
  {
    const Schedule s = Schedule::constant(1.0);
    const std::vector<DomainComponent> comps = {
        DomainComponent::finite({0.0, 1.0, 2.5}),
        DomainComponent::interval(-1.0, 2.0)};
    Rng rng = make_stream(7, "selftest-omega");
    bool pass = true;
    for (const auto& comp : comps) {
      Domain dom({comp});
      for (int i = 0; i < 100; ++i) {
        const double z = rng.uniform(-2.0, 3.0);
        const double t = rng.uniform(0.0, 0.8);
        const double v = beta(s, s.horizon) - beta(s, t);
        const double h = 1e-4;
        const double fd =
            (8.0 * (log_partition(comp, z + h, v) - log_partition(comp, z - h, v)) -
             (log_partition(comp, z + 2 * h, v) - log_partition(comp, z - 2 * h, v))) /
            (12.0 * h);
        const double drift = omega_drift(dom, {z}, t, s)[0];
        const double expected = sigma_sq(s, t) * fd;
        const double rel = std::abs(drift - expected) /
                           std::max({std::abs(drift), std::abs(expected), 1.0});
        if (rel > 1e-6) pass = false;
      }
    }
    report("omega-drift log-partition identity", pass);
  }

  std::cout << "simd backend: "
            << kernels::backend_name(kernels::active_backend()) << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"diffusion-bridge generative modeling experiments"};
  app.require_subcommand(1);

  std::string config_path, params_path;
  std::size_t n_samples = 1000;
  bool trajectories = false;
  long n_mc = -1, k_importance = -1;
  bool exact_kl = false;
  std::string n_list, eps_list, seeds;

  auto* train_cmd = app.add_subcommand("train", "train a model from a config");
  train_cmd->add_option("--config", config_path, "experiment config (JSON)")
      ->required();

  auto* sample_cmd = app.add_subcommand("sample", "draw samples from a model");
  sample_cmd->add_option("--config", config_path)->required();
  sample_cmd->add_option("--params", params_path)->required();
  sample_cmd->add_option("--n", n_samples);
  sample_cmd->add_flag("--trajectories", trajectories,
                       "also emit a trajectory bundle (1-D domains)");

  auto* eval_cmd = app.add_subcommand("eval", "likelihood bounds and exact KL");
  eval_cmd->add_option("--config", config_path)->required();
  eval_cmd->add_option("--params", params_path)->required();
  eval_cmd->add_option("--n-mc", n_mc);
  eval_cmd->add_option("--k-importance", k_importance);
  eval_cmd->add_flag("--exact-kl", exact_kl);

  auto* rate_cmd = app.add_subcommand("rate", "discretization/statistical rate sweep");
  rate_cmd->add_option("--config", config_path)->required();
  rate_cmd->add_option("--n-list", n_list, "comma-separated data sizes");
  rate_cmd->add_option("--eps-list", eps_list, "comma-separated step sizes");
  rate_cmd->add_option("--seeds", seeds, "comma-separated seeds");

  auto* selftest_cmd = app.add_subcommand("selftest", "bundled property checks");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) return cmd_train(config_path);
    if (sample_cmd->parsed())
      return cmd_sample(config_path, params_path, n_samples, trajectories);
    if (eval_cmd->parsed())
      return cmd_eval(config_path, params_path, n_mc, k_importance, exact_kl);
    if (rate_cmd->parsed()) return cmd_rate(config_path, n_list, eps_list, seeds);
    if (selftest_cmd->parsed()) return cmd_selftest();
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalDivergence& e) {
    std::cerr << "error: numeric: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const IoError& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: io: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
