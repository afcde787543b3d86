#include "merton/errors.hpp"
#include "merton/montecarlo.hpp"
#include "merton/philox.hpp"

#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <cstring>

using namespace merton;

namespace {

const ModelParams& reference() {
  static const ModelParams p = validate_params({1.0, 1.0, 0.5, 0.5, 2.0, 1.0 / 3.0});
  return p;
}

const Policy& policy() {
  static const Policy pol(reference(), find_free_boundary(reference()));
  return pol;
}

SimConfig small_config(double x0, long paths) {
  SimConfig cfg;
  cfg.x0 = x0;
  cfg.n_paths = paths;
  return cfg;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

} // namespace

TEST_CASE("philox known answers") {
  using W = std::array<std::uint32_t, 4>;
  CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) == W{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        W{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        W{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("philox streams") {
  Philox4x32 a(7, 0), b(7, 0), c(7, 1), d(8, 0);
  for (int i = 0; i < 10; ++i) {
    const auto va = a();
    CHECK(va == b());
    CHECK(va != c());
    CHECK(va != d());
  }
}

TEST_CASE("starting inside the sale region pays the Merton value at once") {
  const SimEstimate est = estimate_value(policy(), small_config(1.0, 100));
  // A * 2^(1/3)
  CHECK(std::abs(est.mean - 1.96555604565667) <= 1e-13);
  CHECK(est.std_error == 0.0);
  CHECK(est.sold_fraction == 1.0);
  CHECK(est.steps == 0);
}

TEST_CASE("paths are deterministic in (seed, index)") {
  const SimConfig cfg = small_config(2.0, 1);
  const PathResult a = simulate_path(policy(), cfg, 17);
  const PathResult b = simulate_path(policy(), cfg, 17);
  const PathResult c = simulate_path(policy(), cfg, 18);
  CHECK(same_bits(a.payoff, b.payoff));
  CHECK(a.steps == b.steps);
  CHECK_FALSE(same_bits(a.payoff, c.payoff));

  SimConfig other = cfg;
  other.seed += 1;
  CHECK_FALSE(same_bits(a.payoff, simulate_path(policy(), other, 17).payoff));
}

TEST_CASE("a single path has zero standard error") {
  const SimEstimate est = estimate_value(policy(), small_config(2.0, 1));
  CHECK(est.n_paths == 1);
  CHECK(est.std_error == 0.0);
  CHECK(est.mean > 0.0);
}

TEST_CASE("parallel and serial estimators agree bit for bit") {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  for (bool antithetic : {false, true}) {
    SimConfig cfg = small_config(2.0, 2000);
    cfg.antithetic = antithetic;
    const SimEstimate par = estimate_value(policy(), cfg, true);
    const SimEstimate ser = estimate_value_serial(policy(), cfg, true);
    CHECK(same_bits(par.mean, ser.mean));
    CHECK(same_bits(par.std_error, ser.std_error));
    CHECK(par.steps == ser.steps);
    REQUIRE(par.payoffs.size() == ser.payoffs.size());
    for (std::size_t i = 0; i < par.payoffs.size(); ++i)
      CHECK(same_bits(par.payoffs[i], ser.payoffs[i]));
  }
  const MomentCheck mp = gbm_moment_check(reference(), 1.0, 0.5, small_config(2.0, 1000));
  const MomentCheck ms = gbm_moment_check_serial(reference(), 1.0, 0.5, small_config(2.0, 1000));
  CHECK(same_bits(mp.sample_mean, ms.sample_mean));
  omp_set_num_threads(saved);
}

TEST_CASE("antithetic partners mirror their increments") {
  SimConfig cfg = small_config(2.0, 4000);
  cfg.antithetic = true;
  const SimEstimate anti = estimate_value(policy(), cfg);
  cfg.antithetic = false;
  const SimEstimate plain = estimate_value(policy(), cfg);
  const double pooled = std::hypot(anti.std_error, plain.std_error);
  CHECK(std::abs(anti.mean - plain.mean) < 2.0 * pooled);

  cfg.antithetic = true;
  cfg.n_paths = 3;
  CHECK_THROWS_AS(estimate_value(policy(), cfg), DomainError);
}

TEST_CASE("estimate matches the ODE value") {
  for (double x0 : {2.0, 3.0, 1.4}) {
    const SimEstimate est = estimate_value(policy(), small_config(x0, 10'000));
    const double v = policy().value(x0, 1.0);
    INFO("x0 = " << x0 << " mean " << est.mean << " se " << est.std_error << " ode " << v);
    CHECK(std::abs(est.mean - v) <= 3.0 * est.std_error);
    CHECK(est.clamp_events == 0);
    CHECK(est.unsold_tail_mean < 1e-6 * v);
  }
}

TEST_CASE("fixed-time sale bound") {
  const ModelParams& p = reference();
  CHECK(std::abs(fixed_time_bound(p, 1.0, 0.0) - merton_closed_form(p).A) <= 1e-15);
  // A exp(-1.861111...)
  CHECK(std::abs(fixed_time_bound(p, 1.0, 1.0) / 0.242589396514384 - 1.0) <= 1e-13);

  // Classical problem fine, but the asset drift outpaces beta: the payoff grows without bound in n
  RawParams r = p.raw();
  r.beta = 0.3;
  r.mu_tilde = 1.5;
  double prev = 0.0;
  for (double n : {1.0, 10.0, 100.0}) {
    const double b = fixed_time_bound(r, 1.0, n);
    CHECK(b > prev);
    prev = b;
  }
  CHECK(prev > 1e3);
}

TEST_CASE("fixed-time sale at time zero is the Merton value of total wealth") {
  const SimEstimate est = estimate_fixed_time_sale(reference(), small_config(2.0, 50), 0.0);
  CHECK(std::abs(est.mean / (merton_closed_form(reference()).A * std::cbrt(3.0)) - 1.0) <= 1e-14);
  CHECK(est.std_error == 0.0);
}

TEST_CASE("the optimal policy beats a fixed-time sale") {
  for (double n : {0.5, 1.0, 2.0}) {
    const SimEstimate fixed = estimate_fixed_time_sale(reference(), small_config(2.0, 4000), n);
    INFO("n = " << n << " fixed " << fixed.mean);
    CHECK(policy().value(2.0, 1.0) >= fixed.mean - 3.0 * fixed.std_error);
  }
}

TEST_CASE("moment of the indivisible asset") {
  for (double t : {0.5, 1.0, 2.0}) {
    const MomentCheck m = gbm_moment_check(reference(), 1.0, t, small_config(2.0, 20'000));
    INFO("t = " << t);
    CHECK(std::abs(m.target - std::exp((1.0 / 6.0 - 1.0 / 36.0) * t)) <= 1e-14);
    CHECK(m.passed);
  }
  CHECK_THROWS_AS(gbm_moment_check(reference(), 1.0, 0.0, SimConfig{}), DomainError);
}

TEST_CASE("moment accumulator") {
  MomentAccumulator acc;
  CHECK(acc.variance() == 0.0);
  for (double v : {1.0, 2.0, 3.0, 4.0})
    acc.push(v);
  CHECK(acc.mean() == 2.5);
  CHECK(std::abs(acc.variance() - 5.0 / 3.0) <= 1e-15);
  CHECK(std::abs(acc.std_error() - std::sqrt(5.0 / 12.0)) <= 1e-15);
}

TEST_CASE("simulation config validation") {
  SimConfig cfg;
  CHECK_NOTHROW(validate_sim_config(cfg));
  cfg.dt = 0.0;
  CHECK_THROWS_AS(validate_sim_config(cfg), DomainError);
  cfg = SimConfig{};
  cfg.dt = cfg.horizon;
  CHECK_THROWS_AS(validate_sim_config(cfg), DomainError);
  cfg = SimConfig{};
  cfg.n_paths = 0;
  CHECK_THROWS_AS(validate_sim_config(cfg), DomainError);
  cfg = SimConfig{};
  cfg.x0 = -1.0;
  CHECK_THROWS_AS(validate_sim_config(cfg), DomainError);
}
