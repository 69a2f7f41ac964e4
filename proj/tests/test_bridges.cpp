#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "bridgekit/bridges.hpp"
#include "bridgekit/rng.hpp"

using namespace bridgekit;

TEST_CASE("bb_drift: constant schedule") {
  const auto s = Schedule::constant(1.0);
  // (x - z) / (T - t)
  CHECK(bb_drift({1.0}, {0.0}, 0.0, s)[0] == doctest::Approx(1.0));
  CHECK(bb_drift({1.0}, {0.0}, 0.5, s)[0] == doctest::Approx(2.0));
  CHECK(bb_drift({0.0}, {2.0}, 0.75, s)[0] == doctest::Approx(-8.0));
}

TEST_CASE("bb_drift: decaying schedule, frozen value") {
  const auto s = Schedule::decay_a(3.0, 3.0);
  // t = 0: sigma_0^2 = 3, remaining variance 1 - e^{-3}; drift = 3/(1 - e^{-3})
  const double d = bb_drift({1.0}, {0.0}, 0.0, s)[0];
  CHECK(d == doctest::Approx(3.0 / (1.0 - std::exp(-3.0))).epsilon(1e-13));
  CHECK(d == doctest::Approx(3.1571871).epsilon(1e-6));
}

TEST_CASE("bb_drift rejects the horizon") {
  const auto s = Schedule::constant(1.0);
  CHECK_THROWS_AS(bb_drift({1.0}, {0.0}, 1.0, s), std::domain_error);
}

TEST_CASE("h_transform_drift reduces to bb_drift at alpha = 0") {
  const BaselineQ base{0.0, Schedule::decay_a(3.0, 3.0)};
  Rng rng = make_stream(17, "bridge-equiv");
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-3.0, 3.0);
    const double z = rng.uniform(-3.0, 3.0);
    const double t = rng.uniform(0.0, 0.99);
    CHECK(h_transform_drift(base, {x}, {z}, t)[0] ==
          doctest::Approx(bb_drift({x}, {z}, t, base.schedule)[0]).epsilon(1e-14));
  }
}

TEST_CASE("h_transform_drift: OU closed form, frozen value") {
  // alpha = 0.5, unit constant schedule, t = 0, x = 1, z = 0:
  // drift = e^{0.5} * 1 / (e - 1)
  const BaselineQ base{0.5, Schedule::constant(1.0)};
  CHECK(ou_alpha_horizon(base, 0.0) == doctest::Approx(std::exp(0.5)).epsilon(1e-14));
  CHECK(ou_beta_horizon(base, 0.0) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  const double d = h_transform_drift(base, {1.0}, {0.0}, 0.0)[0];
  CHECK(d == doctest::Approx(std::exp(0.5) / (std::exp(1.0) - 1.0)).epsilon(1e-13));
  CHECK(d == doctest::Approx(0.9595174).epsilon(1e-6));
}

TEST_CASE("h_transform_drift matches a Monte-Carlo conditioning oracle") {
  // Simulate the OU baseline finely from (z, t), keep paths landing near x,
  // and regress the first-step increment. The conditional drift of the kept
  // paths must match the closed form.
  const BaselineQ base{0.5, Schedule::constant(1.0)};
  const double t0 = 0.25, z0 = 0.3, x = 1.0;
  const double closed = h_transform_drift(base, {x}, {z0}, t0)[0];

  const int n_steps = 200;
  const double dt = (1.0 - t0) / n_steps;
  Rng rng = make_stream(23, "bridge-mc");
  double num = 0.0, wsum = 0.0;
  const double band = 0.05;
  for (int i = 0; i < 400000; ++i) {
    double z = z0;
    double first_inc = 0.0;
    for (int k = 0; k < n_steps; ++k) {
      const double inc = base.ou_rate * z * dt + std::sqrt(dt) * rng.normal();
      if (k == 0) first_inc = inc;
      z += inc;
    }
    if (std::abs(z - x) < band) {
      num += first_inc;
      wsum += 1.0;
    }
  }
  REQUIRE(wsum > 1000.0);
  const double mc_drift = num / wsum / dt;
  // MC noise: sd(inc)/dt/sqrt(n_kept) ~ (sqrt(dt)/dt)/sqrt(n) ~ 16/sqrt(n).
  const double se = (1.0 / std::sqrt(dt)) / std::sqrt(wsum);
  CHECK(std::abs(mc_drift - closed) < 4.0 * se + 0.05);
}

TEST_CASE("init_sample: delta and gaussian") {
  const auto s = Schedule::constant(1.0);
  Rng rng = make_stream(29, "bridge-init");
  CHECK(init_sample(InitRule::delta({0.25, -1.0}), {9.0, 9.0}, s, rng) ==
        std::vector<double>{0.25, -1.0});
  const auto g = InitRule::gaussian({2.0}, 0.0);
  CHECK(init_sample(g, {9.0}, s, rng)[0] == 2.0);
}

TEST_CASE("init_sample: smld moments") {
  const auto s = Schedule::decay_a(3.0, 3.0);  // beta_T = 1 - e^{-3}
  Rng rng = make_stream(31, "bridge-smld");
  const std::vector<double> x = {2.0};
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = init_sample(InitRule::smld(), x, s, rng)[0];
    s1 += z - x[0];
    s2 += (z - x[0]) * (z - x[0]);
  }
  const double beta_T = 1.0 - std::exp(-3.0);
  CHECK(std::abs(s1 / n) < 4.0 * std::sqrt(beta_T / n));
  CHECK(s2 / n == doctest::Approx(beta_T).epsilon(0.02));
}

TEST_CASE("optimal_drift_oracle: symmetric binary target") {
  const auto s = Schedule::constant(1.0);
  // Uniform on {0, 1} from Delta(0): on the symmetry line z = t/2 the
  // posterior mean is 1/2, so s* = (1/2 - t/2)/(1 - t) = 1/2.
  for (double t : {0.1, 0.3, 0.6, 0.9}) {
    CHECK(optimal_drift_oracle({0.0, 1.0}, {0.5, 0.5}, t / 2.0, t, 0.0, s) ==
          doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("optimal_drift_oracle: point mass reduces to the bridge drift") {
  const auto s = Schedule::constant(1.0);
  for (double t : {0.2, 0.5, 0.8}) {
    for (double z : {-1.0, 0.0, 0.4}) {
      CHECK(optimal_drift_oracle({0.0, 1.0}, {0.0, 1.0}, z, t, 0.0, s) ==
            doctest::Approx((1.0 - z) / (1.0 - t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("optimal_drift_oracle: far-field point is pulled to the nearest atom") {
  const auto s = Schedule::constant(1.0);
  // z = 10 at t = 0.5: posterior mass collapses on x = 1, s* = (1-10)/0.5.
  CHECK(optimal_drift_oracle({0.0, 1.0}, {0.5, 0.5}, 10.0, 0.5, 0.0, s) ==
        doctest::Approx(-18.0).epsilon(1e-9));
}

TEST_CASE("optimal_drift_oracle: t = 0 requires z = z0 and gives the prior mean") {
  const auto s = Schedule::constant(1.0);
  CHECK(optimal_drift_oracle({0.0, 1.0}, {0.25, 0.75}, 0.0, 0.0, 0.0, s) ==
        doctest::Approx(0.75).epsilon(1e-12));
  CHECK_THROWS_AS(optimal_drift_oracle({0.0, 1.0}, {0.5, 0.5}, 0.5, 0.0, 0.0, s),
                  std::domain_error);
  CHECK_THROWS(optimal_drift_oracle({0.0, 1.0}, {0.5, 0.5}, 0.0, 0.3, 0.0,
                                    Schedule::decay_b(1.0)));
}
