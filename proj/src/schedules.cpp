#include "bridgekit/schedules.hpp"

#include <cmath>
#include <stdexcept>

namespace bridgekit {
namespace {

void check_params(const Schedule& s) {
  if (!(s.a > 0.0)) throw std::invalid_argument("Schedule: a must be positive");
  if ((s.kind == ScheduleKind::DecayA || s.kind == ScheduleKind::DecayC) &&
      !(s.b > 0.0))
    throw std::invalid_argument("Schedule: b must be positive");
  if (!(s.horizon > 0.0))
    throw std::invalid_argument("Schedule: horizon must be positive");
}

void check_time(const Schedule& s, double t) {
  if (!(t >= 0.0 && t <= s.horizon))
    throw std::domain_error("Schedule: t outside [0, T]");
}

}  // namespace

Schedule Schedule::constant(double a, double horizon) {
  Schedule s{ScheduleKind::Constant, a, 1.0, horizon};
  check_params(s);
  return s;
}

Schedule Schedule::decay_a(double a, double b, double horizon) {
  Schedule s{ScheduleKind::DecayA, a, b, horizon};
  check_params(s);
  return s;
}

Schedule Schedule::decay_b(double a, double horizon) {
  Schedule s{ScheduleKind::DecayB, a, 1.0, horizon};
  check_params(s);
  return s;
}

Schedule Schedule::decay_c(double a, double b, double horizon) {
  Schedule s{ScheduleKind::DecayC, a, b, horizon};
  check_params(s);
  return s;
}

double sigma_sq(const Schedule& s, double t) {
  check_params(s);
  check_time(s, t);
  switch (s.kind) {
    case ScheduleKind::Constant:
      return s.a;
    case ScheduleKind::DecayA:
      return s.a * std::exp(-s.b * t);
    case ScheduleKind::DecayB:
      return s.a * (1.0 - t / s.horizon);
    case ScheduleKind::DecayC:
      return s.a - s.a * std::exp(-s.b * (s.horizon - t));
  }
  throw std::logic_error("Schedule: bad kind");
}

std::vector<detail::ExpTerm> detail::sigma_sq_terms(const Schedule& s) {
  switch (s.kind) {
    case ScheduleKind::Constant:
      return {{s.a, 0.0, 0}};
    case ScheduleKind::DecayA:
      return {{s.a, -s.b, 0}};
    case ScheduleKind::DecayB:
      return {{s.a, 0.0, 0}, {-s.a / s.horizon, 0.0, 1}};
    case ScheduleKind::DecayC:
      return {{s.a, 0.0, 0}, {-s.a * std::exp(-s.b * s.horizon), s.b, 0}};
  }
  throw std::logic_error("Schedule: bad kind");
}

double detail::exp_poly_integral(double c, int p, double t0, double t1) {
  const double d = t1 - t0;
  if (p == 0) {
    if (c == 0.0) return d;
    return std::exp(c * t0) * std::expm1(c * d) / c;
  }
  // p == 1
  const double scale = std::max(std::abs(t0), std::abs(t1));
  if (std::abs(c) * scale < 1e-4) {
    // Taylor in c; four terms keep relative error below ~1e-16 at the cutoff.
    auto pw = [](double t, int n) { return std::pow(t, n); };
    return (pw(t1, 2) - pw(t0, 2)) / 2.0 + c * (pw(t1, 3) - pw(t0, 3)) / 3.0 +
           c * c * (pw(t1, 4) - pw(t0, 4)) / 8.0 +
           c * c * c * (pw(t1, 5) - pw(t0, 5)) / 30.0;
  }
  // Integration by parts: int t e^{ct} = [t e^{ct}/c] - int e^{ct}/c.
  const double boundary = (t1 * std::exp(c * t1) - t0 * std::exp(c * t0)) / c;
  return boundary - exp_poly_integral(c, 0, t0, t1) / c;
}

double beta(const Schedule& s, double t) {
  check_params(s);
  check_time(s, t);
  double acc = 0.0;
  for (const auto& term : detail::sigma_sq_terms(s)) {
    acc += term.coef * detail::exp_poly_integral(term.c, term.p, 0.0, t);
  }
  return acc;
}

double sigma_k_sq(const Schedule& s, const TimeGrid& grid, std::size_t k) {
  if (k >= grid.steps()) throw std::out_of_range("sigma_k_sq: interval index");
  const double t0 = grid.knots[k];
  const double t1 = grid.knots[k + 1];
  return (beta(s, t1) - beta(s, t0)) / (t1 - t0);
}

}  // namespace bridgekit
