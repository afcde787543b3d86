// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "merton/hjb_solver.hpp"
#include "merton/montecarlo.hpp"
#include "merton/policy.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>

using namespace merton;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

const ModelParams& reference() {
  static const ModelParams p = validate_params({1.0, 1.0, 0.5, 0.5, 2.0, 1.0 / 3.0});
  return p;
}

const FreeBoundary& boundary() {
  static const FreeBoundary fb = find_free_boundary(reference());
  return fb;
}

Outcome free_boundary() {
  const auto start = Clock::now();
  const FreeBoundary fb = find_free_boundary(reference());
  const double elapsed = seconds_since(start);
  const double diff = std::abs(fb.z_hat - 1.3169624);
  return {diff <= 1e-3 && elapsed < 10.0 && fb.solution.classification.kind == ShotKind::GlobalWithinBounds,
          fmt("z_hat=%.10f |z_hat-1.3169624|=%.2e (tol 1e-3) time=%.3fs (limit 10s)", fb.z_hat, diff, elapsed)};
}

Outcome closed_forms() {
  const MertonClosedForm m = merton_closed_form(reference());
  const double z_bar = zbar_upper_bound(reference());
  const bool ok = std::abs(m.A - 1.56006) <= 1e-5 && std::abs(z_bar - 1.5) <= 1e-12 &&
                  std::abs(m.c_rate - 8.0 / 3.0) <= 1e-12;
  return {ok, fmt("A=%.15f z_bar=%.15f c_rate=%.15f", m.A, z_bar, m.c_rate)};
}

Outcome classifications() {
  const ShotKind at_one = integrate_shot(reference(), 1.0).classification.kind;
  const ShotKind at_bar = integrate_shot(reference(), 1.5).classification.kind;
  const KSolution at_hat = integrate_shot(reference(), boundary().z_hat);
  const bool ok = is_below_type(at_one) && is_above_type(at_bar) &&
                  at_hat.classification.kind == ShotKind::GlobalWithinBounds && at_hat.grid.back() == 50.0;
  return {ok, fmt("z*=1 -> %s, z*=1.5 -> %s, z*=z_hat -> %s to z=%g", shot_kind_name(at_one).data(),
                  shot_kind_name(at_bar).data(), shot_kind_name(at_hat.classification.kind).data(),
                  at_hat.grid.back())};
}

Outcome pasting_and_envelopes() {
  const ModelParams& p = reference();
  const KSolution& s = boundary().solution;
  const Envelopes env(p);
  const double zh = boundary().z_hat;
  const double a = p.alpha();
  const double A = merton_closed_form(p).A;

  const double k_err = std::abs(s.k_values.front() - A * power(zh + 1.0, a)) / s.k_values.front();
  const double kp_err = std::abs(s.kprime_values.front() - A * a * power(zh + 1.0, a - 1.0)) / s.kprime_values.front();
  bool contained = s.grid.front() == zh;
  double max_gap = 0.0;
  double min_gap = INFINITY;
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double z = s.grid[i], k = s.k_values[i], kp = s.kprime_values[i];
    contained = contained && env.b_lower(z) < k && k < env.b_upper(z) && 0.0 < kp && kp < a * k / z;
    max_gap = std::max(max_gap, k - env.b_lower(z));
    min_gap = std::min(min_gap, k - env.b_lower(z));
  }
  const bool ok = k_err <= 1e-12 && kp_err <= 1e-12 && contained && min_gap > 0.0;
  return {ok, fmt("pasting rel err K=%.1e K'=%.1e; containment %s over %zu points; K-B_lower in [%.3e, %.3e]", k_err,
                  kp_err, contained ? "holds" : "FAILS", s.size() - 1, min_gap, max_gap)};
}

Outcome self_consistency() {
  const KSolution& s = boundary().solution;
  const double scaled = hjb_residual_on_grid(reference(), s).max_scaled;
  // Centered differences on the nonuniform grid, skipping the endpoints.
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double h0 = s.grid[i] - s.grid[i - 1], h1 = s.grid[i + 1] - s.grid[i];
    const double fd = (h0 * h0 * s.k_values[i + 1] - h1 * h1 * s.k_values[i - 1] + (h1 * h1 - h0 * h0) * s.k_values[i]) /
                      (h0 * h1 * (h0 + h1));
    worst = std::max(worst, std::abs(fd - s.kprime_values[i]) / s.kprime_values[i]);
  }
  return {scaled < 1e-5 && worst < 1e-4,
          fmt("scaled HJB residual=%.2e (tol 1e-5); max rel |FD(K)-K'|=%.2e (tol 1e-4)", scaled, worst)};
}

Outcome monte_carlo() {
  const Policy pol(reference(), boundary());
  SimConfig cfg;
  cfg.x0 = 2.0;
  cfg.y0 = 1.0;
  cfg.dt = 1e-3;
  cfg.horizon = 20.0;
  cfg.n_paths = 10'000;
  const auto start = Clock::now();
  const SimEstimate est = estimate_value(pol, cfg);
  const double elapsed = seconds_since(start);
  const double v = pol.value(2.0, 1.0);
  const double z = std::abs(est.mean - v) / est.std_error;

  cfg.x0 = 1.0;
  const SimEstimate sale = estimate_value(pol, cfg);
  const double exact = merton_closed_form(reference()).A * std::cbrt(2.0);
  const bool sale_ok = std::abs(sale.mean - exact) <= 1e-12 * exact && sale.std_error == 0.0;

  return {z <= 3.0 && sale_ok && elapsed < 120.0,
          fmt("(2,1): mean=%.6f value=%.6f stderr=%.2e |diff|/stderr=%.2f; (1,1): mean=%.15f exact=%.15f stderr=%g; "
              "time=%.2fs (limit 120s)",
              est.mean, v, est.std_error, z, sale.mean, exact, sale.std_error, elapsed)};
}

Outcome simulator_validation() {
  SimConfig cfg;
  cfg.n_paths = 100'000;
  bool ok = true;
  std::string detail;
  for (double t : {0.5, 1.0, 2.0}) {
    const MomentCheck m = gbm_moment_check(reference(), 1.0, t, cfg);
    ok = ok && m.passed;
    detail += fmt("t=%g: mean=%.6f target=%.6f z=%.2f; ", t, m.sample_mean, m.target,
                  (m.sample_mean - m.target) / m.std_error);
  }
  const double se_n = gbm_moment_check(reference(), 1.0, 1.0, cfg).std_error;
  cfg.n_paths *= 2;
  const double se_2n = gbm_moment_check(reference(), 1.0, 1.0, cfg).std_error;
  const double ratio = se_2n / se_n;
  const bool ratio_ok = std::abs(ratio * std::sqrt(2.0) - 1.0) <= 0.05;
  detail += fmt("stderr ratio on doubling=%.4f (1/sqrt2=%.4f, tol 5%%)", ratio, 1.0 / std::sqrt(2.0));
  return {ok && ratio_ok, detail};
}

Outcome one_sided_optimality() {
  const Policy pol(reference(), boundary());
  SimConfig cfg;
  cfg.x0 = 2.0;
  cfg.y0 = 1.0;
  const SimEstimate opt = estimate_value(pol, cfg);
  bool ok = true;
  std::string detail = fmt("policy=%.6f (se %.1e); ", opt.mean, opt.std_error);
  for (double n : {0.5, 1.0, 2.0}) {
    const SimEstimate fixed = estimate_fixed_time_sale(reference(), cfg, n);
    const double pooled = std::hypot(opt.std_error, fixed.std_error);
    ok = ok && opt.mean >= fixed.mean - 3.0 * pooled;
    detail += fmt("n=%g: fixed=%.6f margin=%.2f pooled se; ", n, fixed.mean, (opt.mean - fixed.mean) / pooled);
  }
  return {ok, detail};
}

} // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"free boundary location", free_boundary},
      {"closed forms", closed_forms},
      {"shot classification", classifications},
      {"smooth pasting and envelopes", pasting_and_envelopes},
      {"ODE self-consistency", self_consistency},
      {"Monte Carlo agreement", monte_carlo},
      {"simulator validation", simulator_validation},
      {"one-sided optimality", one_sided_optimality},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, run] : criteria) {
    Outcome r;
    try {
      r = run();
    } catch (const std::exception& e) {
      r = {false, std::string("threw: ") + e.what()};
    }
    while (!r.detail.empty() && (r.detail.back() == ' ' || r.detail.back() == ';'))
      r.detail.pop_back();
    failures += r.passed ? 0 : 1;
    std::printf("[%s] %d %s: %s\n", r.passed ? "PASS" : "FAIL", index++, name, r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - 1 - failures, index - 1);
  return failures == 0 ? 0 : 1;
}
