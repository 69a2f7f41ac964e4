#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "bridgekit/schedules.hpp"

namespace bridgekit {

// One coordinate of the output domain: the whole real line, a bounded
// interval [a, b], or a finite sorted set of atoms.
struct RealComponent {};

struct IntervalComponent {
  double lower;
  double upper;
};

struct FiniteComponent {
  std::vector<double> atoms;  // strictly increasing
};

class DomainComponent {
 public:
  DomainComponent(RealComponent c) : v_(c) {}
  DomainComponent(IntervalComponent c);
  DomainComponent(FiniteComponent c);

  static DomainComponent real() { return DomainComponent(RealComponent{}); }
  static DomainComponent interval(double a, double b) {
    return DomainComponent(IntervalComponent{a, b});
  }
  static DomainComponent finite(std::vector<double> atoms) {
    return DomainComponent(FiniteComponent{std::move(atoms)});
  }

  bool is_real() const { return std::holds_alternative<RealComponent>(v_); }
  bool is_interval() const { return std::holds_alternative<IntervalComponent>(v_); }
  bool is_finite() const { return std::holds_alternative<FiniteComponent>(v_); }
  const IntervalComponent& as_interval() const { return std::get<IntervalComponent>(v_); }
  const FiniteComponent& as_finite() const { return std::get<FiniteComponent>(v_); }

 private:
  std::variant<RealComponent, IntervalComponent, FiniteComponent> v_;
};

// Product domain Omega = I_1 x ... x I_d.
struct Domain {
  std::vector<DomainComponent> components;

  Domain() = default;
  explicit Domain(std::vector<DomainComponent> comps);

  std::size_t dim() const { return components.size(); }
  bool all_real() const;
  bool all_finite() const;
  bool has_constrained() const;  // any interval or finite component
};

// Mean of N(mu, var) truncated to the component. Real components pass mu
// through. When the truncation mass underflows entirely the value is clamped
// into the component (the correct v -> 0 limit) and a diagnostic counter is
// bumped; see trunc_underflow_count().
double trunc_gauss_mean(const DomainComponent& c, double mu, double var);

// Thread-local count of underflow fallbacks taken by trunc_gauss_mean.
std::uint64_t trunc_underflow_count();
void reset_trunc_underflow_count();

// Omega-bridge drift: per coordinate sigma_t^2 (E_trunc[x] - z_i) / v with
// v = beta_T - beta_t. Real coordinates contribute zero. Requires t < T.
std::vector<double> omega_drift(const Domain& domain,
                                const std::vector<double>& z, double t,
                                const Schedule& schedule);

// Nearest point of the domain; finite ties break toward the smaller atom.
std::vector<double> project(const Domain& domain, const std::vector<double>& z);
double project_component(const DomainComponent& c, double z);

// All points of a fully finite domain, lexicographic in component order.
// Throws if any component is not finite or the product exceeds max_points.
std::vector<std::vector<double>> enumerate_atoms(const Domain& domain,
                                                 std::size_t max_points = 1000000);

// Index of project(z) within enumerate_atoms order (fully finite domains).
std::size_t atom_index(const Domain& domain, const std::vector<double>& z);

// log of the truncation partition Z(z) for one component at remaining
// variance v (test oracle for the log-partition identity, and the building
// block behind trunc_gauss_mean).
double log_partition(const DomainComponent& c, double z, double v);

}  // namespace bridgekit
