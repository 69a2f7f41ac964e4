#pragma once

#include <vector>

#include "bridgekit/time_grid.hpp"

namespace bridgekit {

enum class ScheduleKind { Constant, DecayA, DecayB, DecayC };

// Noise schedule: the squared diffusion coefficient sigma_t^2 as a function
// of time, with its accumulated variance beta_t = int_0^t sigma_s^2 ds in
// closed form.
//
//   Constant: sigma_t^2 = a
//   DecayA:   sigma_t^2 = a exp(-b t)
//   DecayB:   sigma_t^2 = a (1 - t/T)
//   DecayC:   sigma_t^2 = a - a exp(-b (T - t))
struct Schedule {
  ScheduleKind kind = ScheduleKind::Constant;
  double a = 1.0;
  double b = 1.0;  // rate, used by DecayA and DecayC
  double horizon = 1.0;

  static Schedule constant(double a, double horizon = 1.0);
  static Schedule decay_a(double a, double b, double horizon = 1.0);
  static Schedule decay_b(double a, double horizon = 1.0);
  static Schedule decay_c(double a, double b, double horizon = 1.0);
};

// sigma_t^2. Throws std::domain_error for t outside [0, T].
double sigma_sq(const Schedule& s, double t);

// beta_t = int_0^t sigma_s^2 ds, closed form. Throws for t outside [0, T].
double beta(const Schedule& s, double t);

// Interval-averaged squared noise over grid interval k:
//   sigma_k^2 = (beta(t_{k+1}) - beta(t_k)) / (t_{k+1} - t_k)
double sigma_k_sq(const Schedule& s, const TimeGrid& grid, std::size_t k);

namespace detail {

// sigma_t^2 expressed as a sum of coef * t^p * exp(c t) terms (p in {0,1}),
// so both beta and the OU transition variance reduce to one exp-polynomial
// integrator.
struct ExpTerm {
  double coef;
  double c;
  int p;
};

std::vector<ExpTerm> sigma_sq_terms(const Schedule& s);

// int_{t0}^{t1} t^p exp(c t) dt, stable as c -> 0.
double exp_poly_integral(double c, int p, double t0, double t1);

}  // namespace detail

}  // namespace bridgekit
