#include "merton/montecarlo.hpp"

#include "merton/errors.hpp"
#include "merton/philox.hpp"

#include <cmath>
#include <exception>
#include <optional>
#include <random>
#include <sstream>

namespace merton {

namespace {

constexpr int kMaxRefinements = 3;

// Stream tags keep the three simulations on disjoint Philox counters.
enum class StreamTag : std::uint64_t { policy = 0, fixed_time = 1, gbm_moment = 2 };

std::uint64_t stream_id(StreamTag tag, std::uint64_t base, int attempt) {
  return (static_cast<std::uint64_t>(tag) << 60) | (base << 2) | static_cast<std::uint64_t>(attempt);
}

// Normal increments for one path; odd antithetic partners replay the even stream negated.
class IncrementSource {
public:
  IncrementSource(const SimConfig& cfg, StreamTag tag, std::uint64_t path_index, int attempt)
      : engine_(cfg.seed, stream_id(tag, cfg.antithetic ? path_index >> 1 : path_index, attempt)),
        sign_(cfg.antithetic && (path_index & 1U) ? -1.0 : 1.0) {}

  double operator()() { return sign_ * normal_(engine_); }

private:
  Philox4x32 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  double sign_;
};

long step_count(double span, double dt) {
  return static_cast<long>(std::llround(span / dt));
}

std::optional<PathResult> run_policy_path(const Policy& pol, const SimConfig& cfg, double dt,
                                          std::uint64_t path_index, int attempt) {
  const ModelParams& p = pol.params();
  const double a = p.alpha();
  const double A = pol.merton().A;
  const double sqrt_dt = std::sqrt(dt);
  IncrementSource dw(cfg, StreamTag::policy, path_index, attempt);

  PathResult out;
  double x = cfg.x0;
  double y = cfg.y0;
  const long n_steps = step_count(cfg.horizon, dt);
  for (long k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double discount = std::exp(-p.beta() * t);
    if (pol.should_sell(x, y)) {
      out.payoff += discount * A * power(x + y, a);
      out.sold = true;
      out.steps = k;
      return out;
    }
    bool clamped = false;
    const double level = pol.consumption_level_clamped(x, y, clamped);
    out.clamp_events += clamped ? 1 : 0;
    out.payoff += discount * power(level, a) / a * dt;

    const double dw_x = sqrt_dt * dw();
    const double dw_y = sqrt_dt * dw();
    x += (p.mu() * x - level) * dt + p.sigma() * x * dw_x;
    y += p.mu_tilde() * y * dt + p.sigma_tilde() * y * dw_y;
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
      return std::nullopt;
  }
  out.steps = n_steps;
  out.unsold_tail = std::exp(-p.beta() * cfg.horizon) * A * power(x + y, a);
  return out;
}

std::optional<PathResult> run_fixed_time_path(const ModelParams& p, const MertonClosedForm& m,
                                              const SimConfig& cfg, double dt, double sale_time,
                                              std::uint64_t path_index, int attempt) {
  const double a = p.alpha();
  const double sqrt_dt = std::sqrt(dt);
  IncrementSource dw(cfg, StreamTag::fixed_time, path_index, attempt);

  PathResult out;
  double x = cfg.x0;
  double y = cfg.y0;
  const long n_steps = step_count(sale_time, dt);
  for (long k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double level = m.c_rate * x;
    out.payoff += std::exp(-p.beta() * t) * power(level, a) / a * dt;
    const double dw_x = sqrt_dt * dw();
    const double dw_y = sqrt_dt * dw();
    x += (p.mu() * x - level) * dt + p.sigma() * x * dw_x;
    y += p.mu_tilde() * y * dt + p.sigma_tilde() * y * dw_y;
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
      return std::nullopt;
  }
  out.payoff += std::exp(-p.beta() * static_cast<double>(n_steps) * dt) * m.A * power(x + y, a);
  out.sold = true;
  out.steps = n_steps;
  return out;
}

template <class Attempt>
PathResult with_refinement(const SimConfig& cfg, std::uint64_t path_index, Attempt&& attempt) {
  double dt = cfg.dt;
  for (int i = 0; i <= kMaxRefinements; ++i, dt *= 0.5) {
    if (auto r = attempt(dt, i))
      return *r;
  }
  std::ostringstream msg;
  msg << "path " << path_index << " left (0, inf) even at dt=" << cfg.dt / (1 << kMaxRefinements);
  throw NonFinite(msg.str());
}

// Merges per-path results in index order. Antithetic pairs enter the variance as pair means.
SimEstimate summarize(const SimConfig& cfg, const std::vector<PathResult>& paths, bool keep_payoffs) {
  MomentAccumulator acc;
  SimEstimate est;
  long sold = 0;
  double tail = 0.0;
  const std::size_t stride = cfg.antithetic ? 2 : 1;
  for (std::size_t i = 0; i < paths.size(); i += stride) {
    double v = paths[i].payoff;
    if (cfg.antithetic)
      v = 0.5 * (v + paths[i + 1].payoff);
    acc.push(v);
  }
  for (const auto& r : paths) {
    sold += r.sold ? 1 : 0;
    est.clamp_events += r.clamp_events;
    est.steps += r.steps;
    tail += r.unsold_tail;
    if (keep_payoffs)
      est.payoffs.push_back(r.payoff);
  }
  const auto n = static_cast<double>(paths.size());
  est.mean = acc.mean();
  est.std_error = acc.std_error();
  est.n_paths = static_cast<long>(paths.size());
  est.sold_fraction = static_cast<double>(sold) / n;
  est.horizon = cfg.horizon;
  est.unsold_tail_mean = tail / n;
  return est;
}

template <class PathFn>
std::vector<PathResult> run_paths_parallel(long n, PathFn&& fn) {
  std::vector<PathResult> out(static_cast<std::size_t>(n));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 64)
  for (long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::uint64_t>(i));
    } catch (...) {
#pragma omp critical(merton_mc_failure)
      if (!failure)
        failure = std::current_exception();
    }
  }
  if (failure)
    std::rethrow_exception(failure);
  return out;
}

template <class PathFn>
std::vector<PathResult> run_paths_serial(long n, PathFn&& fn) {
  std::vector<PathResult> out;
  out.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i)
    out.push_back(fn(static_cast<std::uint64_t>(i)));
  return out;
}

double gbm_alpha_moment(const ModelParams& p, double y0, double t, const SimConfig& cfg,
                        std::uint64_t path_index) {
  const long n_steps = step_count(t, cfg.dt);
  const double sqrt_dt = std::sqrt(cfg.dt);
  SimConfig plain = cfg;
  plain.antithetic = false;
  IncrementSource dw(plain, StreamTag::gbm_moment, path_index, 0);
  double y = y0;
  for (long k = 0; k < n_steps; ++k)
    y += p.mu_tilde() * y * cfg.dt + p.sigma_tilde() * y * sqrt_dt * dw();
  if (!(y > 0.0) || !std::isfinite(y)) {
    std::ostringstream msg;
    msg << "asset path " << path_index << " left (0, inf)";
    throw NonFinite(msg.str());
  }
  return power(y, p.alpha());
}

MomentCheck moment_verdict(const ModelParams& p, double y0, double t, const MomentAccumulator& acc) {
  const double target = power(y0, p.alpha()) * std::exp(p.alpha_moment_rate(p.mu_tilde(), p.sigma_tilde()) * t);
  const double se = acc.std_error();
  return {acc.mean(), se, target, std::abs(acc.mean() - target) <= 3.0 * se};
}

void check_moment_inputs(double y0, double t, const SimConfig& cfg) {
  if (!(y0 > 0.0) || !(t > 0.0) || !(cfg.dt > 0.0) || cfg.n_paths < 1)
    throw DomainError(ErrorKind::range, "moment check needs y0, t, dt > 0 and at least one path");
}

} // namespace

void MomentAccumulator::push(double v) noexcept {
  ++n_;
  const double delta = v - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (v - mean_);
}

double MomentAccumulator::variance() const noexcept {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double MomentAccumulator::std_error() const noexcept {
  return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

void validate_sim_config(const SimConfig& cfg) {
  if (!(cfg.dt > 0.0) || !(cfg.dt < cfg.horizon))
    throw DomainError(ErrorKind::range, "need 0 < dt < horizon");
  if (cfg.n_paths < 1)
    throw DomainError(ErrorKind::range, "need at least one path");
  if (cfg.antithetic && cfg.n_paths % 2 != 0)
    throw DomainError(ErrorKind::range, "antithetic sampling needs an even path count");
  if (!(cfg.x0 > 0.0) || !(cfg.y0 > 0.0))
    throw DomainError(ErrorKind::range, "initial wealth and asset value must be positive");
}

PathResult simulate_path(const Policy& pol, const SimConfig& cfg, std::uint64_t path_index) {
  return with_refinement(cfg, path_index, [&](double dt, int attempt) {
    return run_policy_path(pol, cfg, dt, path_index, attempt);
  });
}

SimEstimate estimate_value(const Policy& pol, const SimConfig& cfg, bool keep_payoffs) {
  validate_sim_config(cfg);
  const auto paths = run_paths_parallel(cfg.n_paths, [&](std::uint64_t i) { return simulate_path(pol, cfg, i); });
  return summarize(cfg, paths, keep_payoffs);
}

SimEstimate estimate_value_serial(const Policy& pol, const SimConfig& cfg, bool keep_payoffs) {
  validate_sim_config(cfg);
  const auto paths = run_paths_serial(cfg.n_paths, [&](std::uint64_t i) { return simulate_path(pol, cfg, i); });
  return summarize(cfg, paths, keep_payoffs);
}

SimEstimate estimate_fixed_time_sale(const ModelParams& p, const SimConfig& cfg, double sale_time) {
  validate_sim_config(cfg);
  if (!(sale_time >= 0.0))
    throw DomainError(ErrorKind::range, "sale time must be nonnegative");
  const MertonClosedForm m = merton_closed_form(p);
  const auto paths = run_paths_parallel(cfg.n_paths, [&](std::uint64_t i) {
    return with_refinement(cfg, i, [&](double dt, int attempt) {
      return run_fixed_time_path(p, m, cfg, dt, sale_time, i, attempt);
    });
  });
  return summarize(cfg, paths, false);
}

double fixed_time_bound(const RawParams& p, double y0, double n) {
  const double A = merton_closed_form(p).A;
  const double rate = -p.beta + p.alpha * p.mu_tilde + 0.5 * p.alpha * (p.alpha - 1.0) * p.sigma_tilde * p.sigma_tilde;
  return A * power(y0, p.alpha) * std::exp(rate * n);
}

double fixed_time_bound(const ModelParams& p, double y0, double n) {
  return fixed_time_bound(p.raw(), y0, n);
}

MomentCheck gbm_moment_check(const ModelParams& p, double y0, double t, const SimConfig& cfg) {
  check_moment_inputs(y0, t, cfg);
  std::vector<double> samples(static_cast<std::size_t>(cfg.n_paths));
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (long i = 0; i < cfg.n_paths; ++i) {
    try {
      samples[static_cast<std::size_t>(i)] = gbm_alpha_moment(p, y0, t, cfg, static_cast<std::uint64_t>(i));
    } catch (...) {
#pragma omp critical(merton_mc_failure)
      if (!failure)
        failure = std::current_exception();
    }
  }
  if (failure)
    std::rethrow_exception(failure);
  MomentAccumulator acc;
  for (double s : samples)
    acc.push(s);
  return moment_verdict(p, y0, t, acc);
}

MomentCheck gbm_moment_check_serial(const ModelParams& p, double y0, double t, const SimConfig& cfg) {
  check_moment_inputs(y0, t, cfg);
  MomentAccumulator acc;
  for (long i = 0; i < cfg.n_paths; ++i)
    acc.push(gbm_alpha_moment(p, y0, t, cfg, static_cast<std::uint64_t>(i)));
  return moment_verdict(p, y0, t, acc);
}

} // namespace merton
