#pragma once

#include "merton/model_core.hpp"
#include "merton/policy.hpp"

#include <cstdint>
#include <vector>

namespace merton {

struct SimConfig {
  double dt = 1e-3;
  double horizon = 20.0;
  long n_paths = 10'000;
  std::uint64_t seed = 20240601;
  double x0 = 2.0;
  double y0 = 1.0;
  // Pairs path 2k with 2k+1 driven by negated increments; n_paths must be even.
  bool antithetic = false;
};

/// Throws DomainError(range) unless dt < horizon, n_paths >= 1, x0, y0 > 0.
void validate_sim_config(const SimConfig& cfg);

struct PathResult {
  double payoff = 0.0;
  bool sold = false;
  long clamp_events = 0;
  long steps = 0;
  // e^{-beta T} A (X_T + Y_T)^alpha for a path still unsold at the horizon.
  double unsold_tail = 0.0;
};

struct SimEstimate {
  double mean = 0.0;
  double std_error = 0.0; // sample sd / sqrt(n); 0 for a single path
  long n_paths = 0;
  double sold_fraction = 0.0;
  long clamp_events = 0;
  long steps = 0;
  double horizon = 0.0;
  double unsold_tail_mean = 0.0;
  std::vector<double> payoffs; // filled only on request
};

/// Running mean and variance (Welford) merged in path-index order so that the
/// serial and OpenMP estimators are bit-identical.
class MomentAccumulator {
public:
  void push(double v) noexcept;
  long count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept; // unbiased; 0 when count < 2
  double std_error() const noexcept;

private:
  long n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Euler-Maruyama path of the controlled pair (X, Y) under `pol`.
/// Sells at the first grid time with X/Y <= z_hat; consumption is frozen over a step.
/// If the state leaves (0, inf) the path is redrawn with dt halved, up to 3 times,
/// after which NonFinite is thrown.
PathResult simulate_path(const Policy& pol, const SimConfig& cfg, std::uint64_t path_index);

/// OpenMP kernel over paths.
SimEstimate estimate_value(const Policy& pol, const SimConfig& cfg, bool keep_payoffs = false);
/// Straight loop; reference for the parallel kernel.
SimEstimate estimate_value_serial(const Policy& pol, const SimConfig& cfg, bool keep_payoffs = false);

/// Comparator strategy: consume at the classical rate c_rate X and sell at the
/// fixed time `sale_time` (collecting A (X+Y)^alpha there).
SimEstimate estimate_fixed_time_sale(const ModelParams& p, const SimConfig& cfg, double sale_time);

/// A y0^alpha exp{(-beta + alpha mu_tilde + alpha(alpha-1) sigma_tilde^2/2) n}:
/// the payoff floor of the fixed-time sale tau = n. Any beta is accepted.
double fixed_time_bound(const RawParams& p, double y0, double n);
double fixed_time_bound(const ModelParams& p, double y0, double n);

struct MomentCheck {
  double sample_mean;
  double std_error;
  double target;
  bool passed; // |sample_mean - target| <= 3 std_error
};

/// Simulates the uncontrolled indivisible asset with the same stepping scheme
/// and compares E[Y_t^alpha] with y0^alpha exp{(alpha mu_tilde + alpha(alpha-1) sigma_tilde^2/2) t}.
MomentCheck gbm_moment_check(const ModelParams& p, double y0, double t, const SimConfig& cfg);
MomentCheck gbm_moment_check_serial(const ModelParams& p, double y0, double t, const SimConfig& cfg);

} // namespace merton
