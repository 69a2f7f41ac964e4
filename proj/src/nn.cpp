#include "bridgekit/nn.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "bridgekit/kernels.hpp"

namespace bridgekit {
namespace {

// Linear layers: input -> width (x hidden_layers, tanh) -> dim (linear).
struct LayerDims {
  std::size_t rows;
  std::size_t cols;
  std::size_t offset;  // into the flat param vector
};

std::vector<LayerDims> layer_dims(const MlpArchitecture& a) {
  std::vector<LayerDims> dims;
  std::size_t in = a.input_width();
  std::size_t off = 0;
  for (std::size_t l = 0; l < a.hidden_layers; ++l) {
    dims.push_back({a.width, in, off});
    off += a.width * in + a.width;
    in = a.width;
  }
  dims.push_back({a.dim, in, off});
  return dims;
}

}  // namespace

std::array<double, 4> time_features(double t, double horizon) {
  if (!(t >= 0.0 && t <= horizon))
    throw std::domain_error("time_features: t outside [0, T]");
  const double u = t / horizon;
  return {u, std::sin(2.0 * std::numbers::pi * u),
          std::cos(2.0 * std::numbers::pi * u), std::sqrt(1.0 - u)};
}

std::size_t MlpArchitecture::param_count() const {
  const auto dims = layer_dims(*this);
  const auto& last = dims.back();
  return last.offset + last.rows * last.cols + last.rows;
}

Mlp Mlp::zeros(const MlpArchitecture& arch) {
  return {arch, std::vector<double>(arch.param_count(), 0.0)};
}

Mlp Mlp::random(const MlpArchitecture& arch, Rng& rng) {
  Mlp m{arch, std::vector<double>(arch.param_count())};
  for (const auto& d : layer_dims(arch)) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(d.cols));
    for (std::size_t i = 0; i < d.rows * d.cols; ++i)
      m.params[d.offset + i] = scale * rng.normal();
    for (std::size_t i = 0; i < d.rows; ++i)
      m.params[d.offset + d.rows * d.cols + i] = 0.0;
  }
  return m;
}

std::vector<double> mlp_forward(const Mlp& mlp, const std::vector<double>& z,
                                double t, double horizon, MlpWorkspace& ws) {
  const auto& a = mlp.arch;
  if (z.size() != a.dim) throw std::invalid_argument("mlp_forward: bad input dim");
  const auto dims = layer_dims(a);
  ws.pre.resize(dims.size());
  ws.act.resize(dims.size() + 1);

  auto& input = ws.act[0];
  input.resize(a.input_width());
  std::copy(z.begin(), z.end(), input.begin());
  const auto tf = time_features(t, horizon);
  std::copy(tf.begin(), tf.end(), input.begin() + a.dim);

  for (std::size_t l = 0; l < dims.size(); ++l) {
    const auto& d = dims[l];
    const double* w = mlp.params.data() + d.offset;
    const double* b = w + d.rows * d.cols;
    ws.pre[l].resize(d.rows);
    kernels::matvec(w, ws.act[l].data(), b, ws.pre[l].data(), d.rows, d.cols);
    ws.act[l + 1].resize(d.rows);
    if (l + 1 < dims.size()) {
      for (std::size_t i = 0; i < d.rows; ++i)
        ws.act[l + 1][i] = std::tanh(ws.pre[l][i]);
    } else {
      ws.act[l + 1] = ws.pre[l];
    }
  }
  return ws.act.back();
}

std::vector<double> mlp_forward(const Mlp& mlp, const std::vector<double>& z,
                                double t, double horizon) {
  MlpWorkspace ws;
  return mlp_forward(mlp, z, t, horizon, ws);
}

void mlp_backward(const Mlp& mlp, const MlpWorkspace& ws,
                  const std::vector<double>& residual, std::vector<double>& grad,
                  MlpWorkspace& scratch) {
  const auto dims = layer_dims(mlp.arch);
  if (grad.size() < mlp.params.size())
    throw std::invalid_argument("mlp_backward: grad size mismatch");
  if (residual.size() != mlp.arch.dim)
    throw std::invalid_argument("mlp_backward: residual size mismatch");

  // Output layer is linear, so dL/d(pre_last) = residual.
  scratch.delta = residual;
  std::vector<double>& delta = scratch.delta;
  std::vector<double> next(mlp.arch.input_width());
  for (std::size_t l = dims.size(); l-- > 0;) {
    const auto& d = dims[l];
    const double* w = mlp.params.data() + d.offset;
    double* gw = grad.data() + d.offset;
    double* gb = gw + d.rows * d.cols;
    kernels::ger_acc(delta.data(), ws.act[l].data(), gw, d.rows, d.cols);
    for (std::size_t i = 0; i < d.rows; ++i) gb[i] += delta[i];
    if (l == 0) break;
    // delta_prev = (W^T delta) * tanh'(pre_{l-1}), tanh' = 1 - act^2
    next.assign(d.cols, 0.0);
    for (std::size_t i = 0; i < d.rows; ++i)
      kernels::axpy(delta[i], w + i * d.cols, next.data(), d.cols);
    delta.resize(d.cols);
    for (std::size_t j = 0; j < d.cols; ++j) {
      const double act = ws.act[l][j];
      delta[j] = next[j] * (1.0 - act * act);
    }
  }
}

std::vector<double> mlp_backward(const Mlp& mlp, const std::vector<double>& z,
                                 double t, double horizon,
                                 const std::vector<double>& residual) {
  MlpWorkspace ws, scratch;
  (void)mlp_forward(mlp, z, t, horizon, ws);
  std::vector<double> grad(mlp.params.size(), 0.0);
  mlp_backward(mlp, ws, residual, grad, scratch);
  return grad;
}

GradCheckReport grad_check(const Mlp& mlp, std::size_t n_probes, double tol,
                           Rng& rng) {
  if (n_probes < 1) throw std::invalid_argument("grad_check: n_probes >= 1");
  const double horizon = 1.0;
  const double h = 1e-4;
  Mlp work = mlp;
  GradCheckReport report;
  report.probes = n_probes;
  double max_err = 0.0;
  for (std::size_t p = 0; p < n_probes; ++p) {
    std::vector<double> z(mlp.arch.dim), target(mlp.arch.dim);
    for (auto& v : z) v = rng.normal();
    for (auto& v : target) v = rng.normal();
    const double t = rng.uniform(0.0, horizon);
    const std::size_t idx = rng.uniform_index(work.params.size());

    auto f = mlp_forward(work, z, t, horizon);
    std::vector<double> residual(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) residual[i] = f[i] - target[i];
    const auto grad = mlp_backward(work, z, t, horizon, residual);

    auto loss_at = [&](double w) {
      const double saved = work.params[idx];
      work.params[idx] = w;
      const auto out = mlp_forward(work, z, t, horizon);
      work.params[idx] = saved;
      double loss = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double r = out[i] - target[i];
        loss += 0.5 * r * r;
      }
      return loss;
    };
    const double w0 = work.params[idx];
    const double fd = (loss_at(w0 + h) - loss_at(w0 - h)) / (2.0 * h);
    const double an = grad[idx];
    const double rel =
        std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-3});
    max_err = std::max(max_err, rel);
  }
  report.max_rel_err = max_err;
  report.pass = max_err < tol;
  return report;
}

std::vector<double> model_drift(const ModelParams& params, const BridgeSpec& spec,
                                const std::vector<double>& z, double t) {
  MlpWorkspace ws;
  std::vector<double> out;
  model_drift(params, spec, z, t, ws, out);
  return out;
}

void model_drift(const ModelParams& params, const BridgeSpec& spec,
                 const std::vector<double>& z, double t, MlpWorkspace& ws,
                 std::vector<double>& out) {
  const Schedule& sched = spec.base.schedule;
  if (!(t >= 0.0 && t < sched.horizon))
    throw std::domain_error("model_drift: t must be in [0, T)");
  if (spec.domain.has_constrained() && !spec.base.is_brownian())
    throw std::invalid_argument(
        "model_drift: constrained domains require a Brownian baseline");
  const double sig = std::sqrt(sigma_sq(sched, t));
  const auto f = mlp_forward(params.mlp, z, t, sched.horizon, ws);
  out.resize(z.size());
  if (spec.domain.has_constrained()) {
    const auto eta = omega_drift(spec.domain, z, t, sched);
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double baseline = spec.domain.components[i].is_real()
                                  ? spec.base.ou_rate * z[i]
                                  : eta[i];
      out[i] = sig * f[i] + baseline;
    }
  } else {
    for (std::size_t i = 0; i < z.size(); ++i)
      out[i] = sig * f[i] + spec.base.ou_rate * z[i];
  }
}

std::vector<double> model_init_sample(const ModelParams& params,
                                      const BridgeSpec& spec, Rng& rng) {
  if (params.init.trainable) {
    const double sd = std::exp(0.5 * params.init.log_var);
    std::vector<double> out(params.init.mean.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      out[i] = params.init.mean[i] + sd * rng.normal();
    return out;
  }
  const InitRule& rule = params.init.frozen;
  if (rule.kind == InitKind::Smld) {
    // Model-side SMLD approximation: N(0, beta_T I), no data dependence.
    const double sd = std::sqrt(beta(spec.base.schedule, spec.base.schedule.horizon));
    std::vector<double> out(spec.domain.dim());
    for (auto& v : out) v = sd * rng.normal();
    return out;
  }
  std::vector<double> zero(spec.domain.dim(), 0.0);
  return init_sample(rule, zero, spec.base.schedule, rng);
}

double model_init_neg_log_density(const ModelParams& params,
                                  const BridgeSpec& spec,
                                  const std::vector<double>& z) {
  double var = 0.0;
  const std::vector<double>* mean = nullptr;
  std::vector<double> zero;
  if (params.init.trainable) {
    var = std::exp(params.init.log_var);
    mean = &params.init.mean;
  } else {
    const InitRule& rule = params.init.frozen;
    switch (rule.kind) {
      case InitKind::Smld:
        var = beta(spec.base.schedule, spec.base.schedule.horizon);
        zero.assign(z.size(), 0.0);
        mean = &zero;
        break;
      case InitKind::Gaussian:
        if (!(rule.var > 0.0))
          throw std::domain_error("model init density: degenerate Gaussian");
        var = rule.var;
        mean = &rule.point;
        break;
      case InitKind::Delta:
        throw std::domain_error("model init density: Delta has no density");
    }
  }
  const double d = static_cast<double>(z.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double r = z[i] - (*mean)[i];
    sq += r * r;
  }
  return 0.5 * sq / var + 0.5 * d * std::log(2.0 * std::numbers::pi * var);
}

InitGrad init_neg_log_density_grad(const InitDist& init, const std::vector<double>& z) {
  if (!init.trainable)
    throw std::invalid_argument("init grad: init distribution is frozen");
  const double var = std::exp(init.log_var);
  InitGrad g;
  g.mean.resize(z.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double r = z[i] - init.mean[i];
    g.mean[i] = -r / var;
    sq += r * r;
  }
  g.log_var = 0.5 * static_cast<double>(z.size()) - 0.5 * sq / var;
  return g;
}

namespace {

constexpr std::uint32_t kMagic = 0x424b5031;  // "BKP1"
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T read_pod(std::ifstream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("params file: truncated");
  return v;
}

void write_vec(std::ofstream& out, const std::vector<double>& v) {
  write_pod<std::uint64_t>(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> read_vec(std::ifstream& in) {
  const auto n = read_pod<std::uint64_t>(in);
  std::vector<double> v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw std::runtime_error("params file: truncated");
  return v;
}

}  // namespace

void save_params(const ModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for write: " + path);
  write_pod(out, kMagic);
  write_pod(out, kVersion);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(params.mlp.arch.dim));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(params.mlp.arch.hidden_layers));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(params.mlp.arch.width));
  write_pod<std::uint8_t>(out, params.init.trainable ? 1 : 0);
  if (params.init.trainable) {
    write_vec(out, params.init.mean);
    write_pod(out, params.init.log_var);
  } else {
    write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(params.init.frozen.kind));
    write_vec(out, params.init.frozen.point);
    write_pod(out, params.init.frozen.var);
  }
  write_vec(out, params.mlp.params);
  if (!out) throw std::runtime_error("write failed: " + path);
}

ModelParams load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  if (read_pod<std::uint32_t>(in) != kMagic)
    throw std::runtime_error("params file: bad magic");
  if (read_pod<std::uint32_t>(in) != kVersion)
    throw std::runtime_error("params file: unsupported version");
  MlpArchitecture arch;
  arch.dim = read_pod<std::uint32_t>(in);
  arch.hidden_layers = read_pod<std::uint32_t>(in);
  arch.width = read_pod<std::uint32_t>(in);
  ModelParams params{Mlp::zeros(arch), InitDist{}};
  if (read_pod<std::uint8_t>(in)) {
    auto mean = read_vec(in);
    const double lv = read_pod<double>(in);
    params.init = InitDist::trainable_gaussian(std::move(mean), lv);
  } else {
    InitRule rule;
    rule.kind = static_cast<InitKind>(read_pod<std::uint8_t>(in));
    rule.point = read_vec(in);
    rule.var = read_pod<double>(in);
    params.init = InitDist::frozen_rule(std::move(rule));
  }
  params.mlp.params = read_vec(in);
  if (params.mlp.params.size() != arch.param_count())
    throw std::runtime_error("params file: weight count mismatch");
  return params;
}

}  // namespace bridgekit
