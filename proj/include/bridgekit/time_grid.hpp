#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bridgekit {

// Time grid 0 = tau_1 < tau_2 < ... < tau_{K+1} = T with K intervals.
struct TimeGrid {
  std::vector<double> knots;

  static TimeGrid uniform(std::size_t k_steps, double horizon) {
    if (k_steps < 1) throw std::invalid_argument("TimeGrid: K must be >= 1");
    TimeGrid g;
    g.knots.resize(k_steps + 1);
    for (std::size_t i = 0; i <= k_steps; ++i) {
      g.knots[i] = horizon * static_cast<double>(i) / static_cast<double>(k_steps);
    }
    g.knots.back() = horizon;
    return g;
  }

  static TimeGrid from_knots(std::vector<double> knots) {
    if (knots.size() < 2) throw std::invalid_argument("TimeGrid: need >= 2 knots");
    for (std::size_t i = 1; i < knots.size(); ++i) {
      if (!(knots[i] > knots[i - 1]))
        throw std::invalid_argument("TimeGrid: knots must be strictly increasing");
    }
    if (knots.front() != 0.0)
      throw std::invalid_argument("TimeGrid: first knot must be 0");
    TimeGrid g;
    g.knots = std::move(knots);
    return g;
  }

  std::size_t steps() const { return knots.size() - 1; }
  double horizon() const { return knots.back(); }
  double step_size(std::size_t k) const {
    if (k >= steps()) throw std::out_of_range("TimeGrid: interval index");
    return knots[k + 1] - knots[k];
  }
};

}  // namespace bridgekit
