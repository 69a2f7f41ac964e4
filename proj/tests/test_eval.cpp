#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>

#include "bridgekit/eval.hpp"
#include "bridgekit/gauss.hpp"

using namespace bridgekit;

namespace {

BridgeSpec binary_spec(std::vector<double> z0 = {0.0}) {
  BridgeSpec spec;
  spec.base = {0.0, Schedule::constant(1.0)};
  spec.domain = Domain({DomainComponent::finite({0.0, 1.0})});
  spec.init = InitRule::delta(std::move(z0));
  return spec;
}

ModelParams zero_model(const BridgeSpec& spec) {
  return {Mlp::zeros({spec.domain.dim(), 2, 8}), InitDist::frozen_rule(spec.init)};
}

}  // namespace

TEST_CASE("kl_to_target: frozen two-atom value") {
  // KL((1/2,1/2) || (3/4,1/4)) = 0.5 ln(4/3) = 0.14384103622589045
  CHECK(kl_to_target({0.75, 0.25}, {0.5, 0.5}) ==
        doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-14));
  CHECK(kl_to_target({0.75, 0.25}, {0.5, 0.5}) ==
        doctest::Approx(0.1438410362258904).epsilon(1e-12));
  CHECK(kl_to_target({0.5, 0.5}, {0.5, 0.5}) == 0.0);
}

TEST_CASE("kl_to_target: zeros and invariances") {
  CHECK(kl_to_target({0.0, 1.0}, {0.5, 0.5}) ==
        std::numeric_limits<double>::infinity());
  // Zero-mass target atoms are ignored regardless of the pmf there.
  CHECK(kl_to_target({0.3, 0.7}, {0.0, 1.0}) ==
        doctest::Approx(std::log(1.0 / 0.7)).epsilon(1e-14));
  // Relabeling atoms together leaves the value unchanged.
  CHECK(kl_to_target({0.2, 0.3, 0.5}, {0.1, 0.4, 0.5}) ==
        doctest::Approx(kl_to_target({0.5, 0.3, 0.2}, {0.5, 0.4, 0.1})).epsilon(1e-14));
  CHECK_THROWS(kl_to_target({0.5, 0.5}, {1.0}));
}

TEST_CASE("kl_to_target_smoothed: finite on empirical zeros, near-identical otherwise") {
  const std::vector<double> target = {0.5, 0.5};
  const double smoothed = kl_to_target_smoothed({1.0, 0.0}, target, 1000);
  CHECK(std::isfinite(smoothed));
  CHECK(smoothed > 1.0);
  // With no zeros the correction is O(1/n).
  const double raw = kl_to_target({0.6, 0.4}, target);
  const double sm = kl_to_target_smoothed({0.6, 0.4}, target, 100000);
  CHECK(std::abs(raw - sm) < 1e-4);
}

TEST_CASE("elbo equals iwbo with one importance sample") {
  const auto spec = binary_spec();
  const auto params = zero_model(spec);
  const auto grid = TimeGrid::uniform(10, 1.0);
  Rng r1 = make_stream(3, "eval-eq");
  Rng r2 = make_stream(3, "eval-eq");
  const auto a = elbo(params, spec, {1.0}, grid, 50, r1);
  const auto b = iwbo(params, spec, {1.0}, grid, 50, 1, r2);
  CHECK(a.value == b.value);
  CHECK(a.std_err == b.std_err);
}

TEST_CASE("single-step bound: closed-form tail mass") {
  // K = 1, zero drift, unit constant schedule, Delta(0) bridge and model
  // init: the bound is exactly -log P(N(0,1) rounds to atom 1)
  // = -log(1 - Phi(0.5)) = 1.1759117615936188.
  const auto spec = binary_spec();
  const auto grid = TimeGrid::uniform(1, 1.0);
  detail::DriftFn zero_drift = [](const std::vector<double>& z, double,
                                  std::vector<double>& out) {
    out.assign(z.size(), 0.0);
  };
  auto nld = [](const std::vector<double>&) { return 0.0; };
  Rng rng = make_stream(5, "eval-k1");
  const auto est = detail::iwbo_with_drift(zero_drift, nld, true, spec, {1.0},
                                           grid, 8, 1, rng, 1e6);
  const double expected = -gauss::log_sf(0.5);
  CHECK(est.value == doctest::Approx(expected).epsilon(1e-12));
  CHECK(est.value == doctest::Approx(1.1759117615936188).epsilon(1e-10));
  CHECK(est.std_err == 0.0);  // the weight is deterministic
}

TEST_CASE("degenerate bridge init without a matching model init is rejected") {
  const auto spec = binary_spec();
  ModelParams params{Mlp::zeros({1, 2, 8}),
                     InitDist::trainable_gaussian({0.0}, 0.0)};
  const auto grid = TimeGrid::uniform(5, 1.0);
  Rng rng = make_stream(7, "eval-deg");
  CHECK_THROWS(elbo(params, spec, {1.0}, grid, 4, rng));
  // Frozen Delta at a different point is also a mismatch.
  ModelParams off{Mlp::zeros({1, 2, 8}),
                  InitDist::frozen_rule(InitRule::delta({0.5}))};
  CHECK_THROWS(elbo(off, spec, {1.0}, grid, 4, rng));
}

TEST_CASE("elbo is reproducible and finite on a real training setup") {
  const auto spec = binary_spec();
  const auto params = zero_model(spec);
  const auto grid = TimeGrid::uniform(20, 1.0);
  Rng r1 = make_stream(9, "eval-rep");
  Rng r2 = make_stream(9, "eval-rep");
  const auto a = elbo(params, spec, {0.0}, grid, 100, r1);
  const auto b = elbo(params, spec, {0.0}, grid, 100, r2);
  CHECK(a.value == b.value);
  CHECK(std::isfinite(a.value));
  CHECK(a.std_err > 0.0);
}

TEST_CASE("exact_terminal_pmf: symmetric start splits evenly") {
  // From the midpoint of {0, 1} the constrained dynamics are symmetric under
  // z -> 1 - z, so the terminal pmf is (1/2, 1/2) up to MC error.
  auto spec = binary_spec({0.5});
  const auto params = zero_model(spec);
  const auto grid = TimeGrid::uniform(25, 1.0);
  const auto pmf = exact_terminal_pmf(params, spec, grid, 20000, 13);
  REQUIRE(pmf.size() == 2);
  CHECK(pmf[0] + pmf[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pmf[0] == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("exact_terminal_pmf is independent of the worker count") {
  auto spec = binary_spec({0.5});
  const auto params = zero_model(spec);
  const auto grid = TimeGrid::uniform(10, 1.0);
  setenv("BRIDGEKIT_THREADS", "1", 1);
  const auto p1 = exact_terminal_pmf(params, spec, grid, 4000, 17);
  setenv("BRIDGEKIT_THREADS", "7", 1);
  const auto p7 = exact_terminal_pmf(params, spec, grid, 4000, 17);
  unsetenv("BRIDGEKIT_THREADS");
  CHECK(p1 == p7);
}

TEST_CASE("rate_experiment validates its sweep") {
  RateConfig cfg;
  cfg.spec = binary_spec();
  CHECK_THROWS(rate_experiment(cfg));  // empty axes / pmf mismatch
  cfg.target_pmf = {0.5, 0.5};
  cfg.n_list = {8};
  cfg.eps_list = {0.1};
  CHECK_THROWS(rate_experiment(cfg));  // no seeds
}

TEST_CASE("rate_experiment runs one tiny cell end to end") {
  RateConfig cfg;
  cfg.spec = binary_spec();
  cfg.target_pmf = {0.5, 0.5};
  cfg.n_list = {32};
  cfg.eps_list = {0.1};
  cfg.seeds = {1};
  cfg.n_eval_samples = 2000;
  cfg.train.n_epochs = 3;
  cfg.train.batch_size = 8;
  cfg.train.steps_per_epoch = 2;
  cfg.train.hidden_layers = 1;
  cfg.train.width = 8;
  const auto rows = rate_experiment(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n == 32);
  CHECK(rows[0].eps == 0.1);
  CHECK(rows[0].seed == 1);
  CHECK(std::isfinite(rows[0].kl_smoothed));
  CHECK(rows[0].kl_smoothed >= 0.0);
}
