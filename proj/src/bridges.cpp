#include "bridgekit/bridges.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bridgekit {

InitRule InitRule::gaussian(std::vector<double> mu0, double v0) {
  if (v0 < 0.0) throw std::invalid_argument("InitRule: v0 must be >= 0");
  return {InitKind::Gaussian, std::move(mu0), v0};
}

double ou_alpha_horizon(const BaselineQ& base, double t) {
  return std::exp(base.ou_rate * (base.schedule.horizon - t));
}

double ou_beta_horizon(const BaselineQ& base, double t) {
  // beta_{T|t} = e^{2 alpha T} int_t^T e^{-2 alpha r} sigma_r^2 dr
  const double T = base.schedule.horizon;
  double acc = 0.0;
  for (const auto& term : detail::sigma_sq_terms(base.schedule)) {
    acc += term.coef *
           detail::exp_poly_integral(term.c - 2.0 * base.ou_rate, term.p, t, T);
  }
  return std::exp(2.0 * base.ou_rate * T) * acc;
}

std::vector<double> bb_drift(const std::vector<double>& x,
                             const std::vector<double>& z, double t,
                             const Schedule& schedule) {
  if (x.size() != z.size()) throw std::invalid_argument("bb_drift: dimension mismatch");
  if (!(t >= 0.0 && t < schedule.horizon))
    throw std::domain_error("bb_drift: drift singular at t >= T");
  const double v = beta(schedule, schedule.horizon) - beta(schedule, t);
  const double ss = sigma_sq(schedule, t);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = ss * (x[i] - z[i]) / v;
  return out;
}

std::vector<double> h_transform_drift(const BaselineQ& base,
                                      const std::vector<double>& x,
                                      const std::vector<double>& z, double t) {
  if (base.is_brownian()) return bb_drift(x, z, t, base.schedule);
  if (x.size() != z.size())
    throw std::invalid_argument("h_transform_drift: dimension mismatch");
  if (!(t >= 0.0 && t < base.schedule.horizon))
    throw std::domain_error("h_transform_drift: drift singular at t >= T");
  const double a_ht = ou_alpha_horizon(base, t);
  const double b_ht = ou_beta_horizon(base, t);
  const double ss = sigma_sq(base.schedule, t);
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = base.ou_rate * z[i] + ss * a_ht * (x[i] - a_ht * z[i]) / b_ht;
  }
  return out;
}

std::vector<double> init_sample(const InitRule& rule, const std::vector<double>& x,
                                const Schedule& schedule, Rng& rng) {
  switch (rule.kind) {
    case InitKind::Smld: {
      const double sd = std::sqrt(beta(schedule, schedule.horizon));
      std::vector<double> out(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + sd * rng.normal();
      return out;
    }
    case InitKind::Delta:
      return rule.point;
    case InitKind::Gaussian: {
      const double sd = std::sqrt(rule.var);
      std::vector<double> out(rule.point.size());
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = rule.point[i] + sd * rng.normal();
      return out;
    }
  }
  throw std::logic_error("InitRule: bad kind");
}

double optimal_drift_oracle(const std::vector<double>& atoms,
                            const std::vector<double>& pmf, double z, double t,
                            double z0, const Schedule& schedule) {
  if (schedule.kind != ScheduleKind::Constant)
    throw std::invalid_argument("optimal_drift_oracle: constant schedule only");
  if (atoms.size() != pmf.size() || atoms.empty())
    throw std::invalid_argument("optimal_drift_oracle: atoms/pmf mismatch");
  const double T = schedule.horizon;
  if (!(t >= 0.0 && t < T))
    throw std::domain_error("optimal_drift_oracle: t must be in [0, T)");
  double expected_x;
  if (t == 0.0) {
    if (z != z0)
      throw std::domain_error("optimal_drift_oracle: conditioning on z != z0 at t = 0");
    expected_x = 0.0;
    for (std::size_t k = 0; k < atoms.size(); ++k) expected_x += pmf[k] * atoms[k];
  } else {
    // Z_t | x ~ N(z0 + (t/T)(x - z0), a t (T - t) / T); posterior in log space.
    const double var = schedule.a * t * (T - t) / T;
    std::vector<double> lw(atoms.size());
    double max_lw = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      if (pmf[k] <= 0.0) {
        lw[k] = -std::numeric_limits<double>::infinity();
        continue;
      }
      const double mean = z0 + (t / T) * (atoms[k] - z0);
      lw[k] = std::log(pmf[k]) - 0.5 * (z - mean) * (z - mean) / var;
      max_lw = std::max(max_lw, lw[k]);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      const double w = std::exp(lw[k] - max_lw);
      num += w * atoms[k];
      den += w;
    }
    expected_x = num / den;
  }
  return (expected_x - z) / (T - t);
}

}  // namespace bridgekit
