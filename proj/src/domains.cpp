#include "bridgekit/domains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bridgekit/gauss.hpp"

namespace bridgekit {
namespace {

thread_local std::uint64_t g_trunc_underflows = 0;

}  // namespace

DomainComponent::DomainComponent(IntervalComponent c) : v_(c) {
  if (!(std::isfinite(c.lower) && std::isfinite(c.upper) && c.lower < c.upper))
    throw std::invalid_argument("Interval component: need finite a < b");
}

DomainComponent::DomainComponent(FiniteComponent c) : v_(std::move(c)) {
  const auto& atoms = std::get<FiniteComponent>(v_).atoms;
  if (atoms.empty())
    throw std::invalid_argument("Finite component: need at least one atom");
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    if (!(atoms[i] > atoms[i - 1]))
      throw std::invalid_argument("Finite component: atoms must be strictly increasing");
  }
}

Domain::Domain(std::vector<DomainComponent> comps) : components(std::move(comps)) {
  if (components.empty()) throw std::invalid_argument("Domain: need d >= 1");
}

bool Domain::all_real() const {
  return std::ranges::all_of(components, [](const auto& c) { return c.is_real(); });
}

bool Domain::all_finite() const {
  return std::ranges::all_of(components, [](const auto& c) { return c.is_finite(); });
}

bool Domain::has_constrained() const {
  return std::ranges::any_of(components, [](const auto& c) { return !c.is_real(); });
}

std::uint64_t trunc_underflow_count() { return g_trunc_underflows; }
void reset_trunc_underflow_count() { g_trunc_underflows = 0; }

double trunc_gauss_mean(const DomainComponent& c, double mu, double var) {
  if (!(var > 0.0)) throw std::domain_error("trunc_gauss_mean: var must be positive");
  if (c.is_real()) return mu;
  if (c.is_interval()) {
    const auto& iv = c.as_interval();
    const double s = std::sqrt(var);
    const double alpha = (iv.lower - mu) / s;
    const double beta = (iv.upper - mu) / s;
    const double mass = gauss::cdf_diff(alpha, beta);
    if (!(mass > 0.0)) {
      ++g_trunc_underflows;
      return std::clamp(mu, iv.lower, iv.upper);
    }
    // Clamp: with near-total truncation the correction can land a rounding
    // error outside the interval.
    return std::clamp(mu + s * (gauss::pdf(alpha) - gauss::pdf(beta)) / mass,
                      iv.lower, iv.upper);
  }
  // Finite: softmax weights in log space with max subtraction.
  const auto& atoms = c.as_finite().atoms;
  double max_lw = -std::numeric_limits<double>::infinity();
  std::vector<double> lw(atoms.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const double d = atoms[k] - mu;
    lw[k] = -0.5 * d * d / var;
    max_lw = std::max(max_lw, lw[k]);
  }
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const double w = std::exp(lw[k] - max_lw);
    num += w * atoms[k];
    den += w;
  }
  return num / den;
}

std::vector<double> omega_drift(const Domain& domain, const std::vector<double>& z,
                                double t, const Schedule& schedule) {
  if (z.size() != domain.dim())
    throw std::invalid_argument("omega_drift: dimension mismatch");
  if (!(t >= 0.0 && t < schedule.horizon))
    throw std::domain_error("omega_drift: t must be in [0, T)");
  const double v = beta(schedule, schedule.horizon) - beta(schedule, t);
  if (!(v > 0.0)) throw std::domain_error("omega_drift: remaining variance is zero");
  const double ss = sigma_sq(schedule, t);
  std::vector<double> drift(z.size(), 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto& c = domain.components[i];
    if (c.is_real()) continue;
    drift[i] = ss * (trunc_gauss_mean(c, z[i], v) - z[i]) / v;
  }
  return drift;
}

double project_component(const DomainComponent& c, double z) {
  if (c.is_real()) return z;
  if (c.is_interval()) {
    const auto& iv = c.as_interval();
    return std::clamp(z, iv.lower, iv.upper);
  }
  const auto& atoms = c.as_finite().atoms;
  auto it = std::ranges::lower_bound(atoms, z);
  if (it == atoms.begin()) return atoms.front();
  if (it == atoms.end()) return atoms.back();
  const double hi = *it;
  const double lo = *(it - 1);
  // Ties (exact midpoint) break toward the smaller atom.
  return (z - lo <= hi - z) ? lo : hi;
}

std::vector<double> project(const Domain& domain, const std::vector<double>& z) {
  if (z.size() != domain.dim())
    throw std::invalid_argument("project: dimension mismatch");
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    out[i] = project_component(domain.components[i], z[i]);
  return out;
}

std::vector<std::vector<double>> enumerate_atoms(const Domain& domain,
                                                 std::size_t max_points) {
  std::size_t total = 1;
  for (const auto& c : domain.components) {
    if (!c.is_finite())
      throw std::invalid_argument("enumerate_atoms: all components must be finite");
    const std::size_t k = c.as_finite().atoms.size();
    if (total > max_points / k + 1)
      throw std::length_error("enumerate_atoms: cardinality exceeds cap");
    total *= k;
  }
  if (total > max_points)
    throw std::length_error("enumerate_atoms: cardinality exceeds cap");
  std::vector<std::vector<double>> points;
  points.reserve(total);
  std::vector<std::size_t> idx(domain.dim(), 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::vector<double> p(domain.dim());
    for (std::size_t i = 0; i < domain.dim(); ++i)
      p[i] = domain.components[i].as_finite().atoms[idx[i]];
    points.push_back(std::move(p));
    // lexicographic increment, last coordinate fastest
    for (std::size_t i = domain.dim(); i-- > 0;) {
      if (++idx[i] < domain.components[i].as_finite().atoms.size()) break;
      idx[i] = 0;
    }
  }
  return points;
}

std::size_t atom_index(const Domain& domain, const std::vector<double>& z) {
  std::size_t index = 0;
  for (std::size_t i = 0; i < domain.dim(); ++i) {
    const auto& atoms = domain.components[i].as_finite().atoms;
    const double p = project_component(domain.components[i], z[i]);
    const auto it = std::ranges::lower_bound(atoms, p);
    index = index * atoms.size() + static_cast<std::size_t>(it - atoms.begin());
  }
  return index;
}

double log_partition(const DomainComponent& c, double z, double v) {
  if (!(v > 0.0)) throw std::domain_error("log_partition: v must be positive");
  if (c.is_real()) return 0.0;
  if (c.is_interval()) {
    const auto& iv = c.as_interval();
    const double s = std::sqrt(v);
    // F((z-a)/sqrt(v)) - F((z-b)/sqrt(v)) == P((z-b)/s < X < (z-a)/s)
    return gauss::log_cdf_diff((z - iv.upper) / s, (z - iv.lower) / s);
  }
  const auto& atoms = c.as_finite().atoms;
  double max_lw = -std::numeric_limits<double>::infinity();
  std::vector<double> lw(atoms.size());
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    const double d = z - atoms[k];
    lw[k] = -0.5 * d * d / v;
    max_lw = std::max(max_lw, lw[k]);
  }
  double acc = 0.0;
  for (double w : lw) acc += std::exp(w - max_lw);
  return max_lw + std::log(acc);
}

}  // namespace bridgekit
