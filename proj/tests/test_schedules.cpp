#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "bridgekit/rng.hpp"
#include "bridgekit/schedules.hpp"

using namespace bridgekit;

TEST_CASE("constant schedule") {
  const auto s = Schedule::constant(2.0);
  CHECK(sigma_sq(s, 0.0) == 2.0);
  CHECK(sigma_sq(s, 0.7) == 2.0);
  CHECK(beta(s, 0.0) == 0.0);
  CHECK(beta(s, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(beta(s, 1.0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("decay_a closed forms") {
  // sigma_t^2 = a exp(-b t); beta_t = (a/b)(1 - exp(-b t))
  const auto s = Schedule::decay_a(3.0, 3.0);
  CHECK(sigma_sq(s, 0.0) == doctest::Approx(3.0));
  CHECK(sigma_sq(s, 1.0) == doctest::Approx(3.0 * std::exp(-3.0)));
  // frozen: 1 - e^{-3} = 0.95021293163213605702...
  CHECK(beta(s, 1.0) == doctest::Approx(0.950212931632136).epsilon(1e-12));
  CHECK(beta(s, 0.5) == doctest::Approx(1.0 - std::exp(-1.5)).epsilon(1e-12));
}

TEST_CASE("decay_b closed forms") {
  // sigma_t^2 = a (1 - t/T); beta_t = a t - a t^2 / (2T)
  const auto s = Schedule::decay_b(3.0);
  CHECK(sigma_sq(s, 0.0) == doctest::Approx(3.0));
  CHECK(sigma_sq(s, 1.0) == doctest::Approx(0.0));
  CHECK(beta(s, 1.0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(beta(s, 0.5) == doctest::Approx(1.125).epsilon(1e-12));
}

TEST_CASE("decay_c closed forms") {
  // sigma_t^2 = a - a exp(-b (T - t))
  const auto s = Schedule::decay_c(3.0, 3.0);
  CHECK(sigma_sq(s, 1.0) == doctest::Approx(0.0));
  CHECK(sigma_sq(s, 0.0) == doctest::Approx(3.0 * (1.0 - std::exp(-3.0))));
  // beta_T = a T - (a/b)(1 - e^{-bT}) = 3 - 0.950212931632136
  CHECK(beta(s, 1.0) == doctest::Approx(3.0 - 0.950212931632136).epsilon(1e-12));
}

TEST_CASE("beta derivative matches sigma_sq everywhere") {
  Rng rng = make_stream(3, "sched-fd");
  const Schedule schedules[] = {
      Schedule::constant(1.7), Schedule::decay_a(3.0, 3.0),
      Schedule::decay_b(2.0), Schedule::decay_c(3.0, 3.0),
      Schedule::decay_a(0.5, 0.25, 2.0)};
  const double h = 1e-6;
  for (const auto& s : schedules) {
    for (int i = 0; i < 200; ++i) {
      const double t = rng.uniform(h, s.horizon - h);
      const double fd = (beta(s, t + h) - beta(s, t - h)) / (2.0 * h);
      CHECK(fd == doctest::Approx(sigma_sq(s, t)).epsilon(1e-6));
    }
  }
}

TEST_CASE("beta is nondecreasing") {
  const Schedule schedules[] = {
      Schedule::constant(1.0), Schedule::decay_a(3.0, 3.0),
      Schedule::decay_b(3.0), Schedule::decay_c(3.0, 3.0)};
  for (const auto& s : schedules) {
    double prev = 0.0;
    for (int i = 1; i <= 100; ++i) {
      const double b = beta(s, s.horizon * i / 100.0);
      CHECK(b >= prev);
      prev = b;
    }
  }
}

TEST_CASE("sigma_k_sq: interval average of the squared noise") {
  const auto s = Schedule::decay_a(3.0, 3.0);
  const auto grid = TimeGrid::from_knots({0.0, 0.5, 1.0});
  // frozen: (beta(0.5) - beta(0)) / 0.5 = 2 (1 - e^{-1.5}) = 1.55373968...
  CHECK(sigma_k_sq(s, grid, 0) ==
        doctest::Approx(2.0 * (1.0 - std::exp(-1.5))).epsilon(1e-12));
  CHECK(sigma_k_sq(s, grid, 0) == doctest::Approx(1.5537396797).epsilon(1e-9));
  // constant schedule: average equals the constant
  const auto c = Schedule::constant(2.0);
  CHECK(sigma_k_sq(c, grid, 1) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("sigma_k_sq lies between the endpoint values for monotone schedules") {
  const auto s = Schedule::decay_a(3.0, 3.0);
  const auto grid = TimeGrid::uniform(10, 1.0);
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const double avg = sigma_k_sq(s, grid, k);
    const double lo = sigma_sq(s, grid.knots[k + 1]);
    const double hi = sigma_sq(s, grid.knots[k]);
    CHECK(avg >= lo);
    CHECK(avg <= hi);
  }
}

TEST_CASE("out-of-range times are rejected") {
  const auto s = Schedule::constant(1.0);
  CHECK_THROWS_AS(sigma_sq(s, -0.01), std::domain_error);
  CHECK_THROWS_AS(sigma_sq(s, 1.01), std::domain_error);
  CHECK_THROWS_AS(beta(s, -0.01), std::domain_error);
  CHECK_THROWS_AS(beta(s, 1.01), std::domain_error);
}

TEST_CASE("invalid constructor arguments are rejected") {
  CHECK_THROWS(Schedule::constant(-1.0));
  CHECK_THROWS(Schedule::constant(0.0));
  CHECK_THROWS(Schedule::decay_a(1.0, -2.0));
  CHECK_THROWS(Schedule::constant(1.0, 0.0));
}

TEST_CASE("exp_poly_integral is stable as c -> 0") {
  using bridgekit::detail::exp_poly_integral;
  // int_0^1 e^{c t} dt -> 1 and int_0^1 t e^{c t} dt -> 1/2
  CHECK(exp_poly_integral(0.0, 0, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(exp_poly_integral(0.0, 1, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(exp_poly_integral(1e-12, 0, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(exp_poly_integral(1e-12, 1, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-10));
  // exact: int_0^1 e^{2t} dt = (e^2 - 1)/2
  CHECK(exp_poly_integral(2.0, 0, 0.0, 1.0) ==
        doctest::Approx((std::exp(2.0) - 1.0) / 2.0).epsilon(1e-14));
  // exact: int_0^1 t e^{2t} dt = (e^2 + 1)/4
  CHECK(exp_poly_integral(2.0, 1, 0.0, 1.0) ==
        doctest::Approx((std::exp(2.0) + 1.0) / 4.0).epsilon(1e-13));
}
