#include "merton/hjb_solver.hpp"

#include "merton/dormand_prince.hpp"
#include "merton/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace merton {

namespace {

constexpr double kBlowDownAcceleration = 1e12;
constexpr long kMaxSteps = 10'000'000;
constexpr int kFallbackSweepPoints = 32;
// Non-uniform differencing below this spacing is dominated by rounding.
constexpr double kMinStencilSpacing = 1e-6;

// Coefficients of the reduced ODE
//   diffusion z^2 K'' + drift z K' + discount K + (1-a)/a (K')^(a/(a-1)) = 0.
struct OdeCoefficients {
  double diffusion;
  double drift;
  double discount;
  double alpha;

  explicit OdeCoefficients(const ModelParams& p)
      : diffusion(0.5 * (p.sigma() * p.sigma() + p.sigma_tilde() * p.sigma_tilde())),
        drift(p.mu() - p.mu_tilde() + (1.0 - p.alpha()) * p.sigma_tilde() * p.sigma_tilde()),
        discount(-p.beta() + p.alpha_moment_rate(p.mu_tilde(), p.sigma_tilde())),
        alpha(p.alpha()) {}

  double consumption_term(double kp) const {
    return (1.0 - alpha) / alpha * power(kp, alpha / (alpha - 1.0));
  }

  // Requires kp > 0.
  double second_derivative(double z, double k, double kp) const {
    return -(drift * z * kp + discount * k + consumption_term(kp)) / (diffusion * z * z);
  }

  double residual(double z, double k, double kp, double kpp) const {
    return diffusion * z * z * kpp + drift * z * kp + discount * k + consumption_term(kp);
  }
};

} // namespace

Envelopes::Envelopes(const ModelParams& p)
    : alpha_(p.alpha()), A_(merton_closed_form(p).A) {}

double Envelopes::b_lower(double z) const { return A_ * power(z + 1.0, alpha_); }

double Envelopes::b_upper(double z) const {
  return A_ * (power(z, alpha_) + power(z + 1.0, alpha_));
}

std::string_view shot_kind_name(ShotKind kind) noexcept {
  switch (kind) {
  case ShotKind::GlobalWithinBounds: return "GlobalWithinBounds";
  case ShotKind::UpperEnvelopeViolation: return "UpperEnvelopeViolation";
  case ShotKind::LowerEnvelopeViolation: return "LowerEnvelopeViolation";
  case ShotKind::DerivativeUpperViolation: return "DerivativeUpperViolation";
  case ShotKind::DerivativeNonpositive: return "DerivativeNonpositive";
  case ShotKind::BlowDown: return "BlowDown";
  case ShotKind::StepFailure: return "StepFailure";
  }
  return "Unknown";
}

double ode_second_derivative(const ModelParams& p, double z, double k, double kp) {
  if (!(kp > 0.0))
    throw DomainError(ErrorKind::range, "K' must be positive for the consumption term");
  if (!(z > 0.0))
    throw DomainError(ErrorKind::range, "z must be positive");
  return OdeCoefficients(p).second_derivative(z, k, kp);
}

double ode_residual(const ModelParams& p, double z, double k, double kp, double kpp) {
  return OdeCoefficients(p).residual(z, k, kp, kpp);
}

std::optional<ShotKind> classify_envelope_state(const Envelopes& env, double z, double k,
                                                double kp, double z_star) {
  const bool interior = z > z_star;
  if (interior && k <= env.b_lower(z))
    return ShotKind::LowerEnvelopeViolation;
  if (k >= env.b_upper(z))
    return ShotKind::UpperEnvelopeViolation;
  if (kp <= Envelopes::c_lower())
    return ShotKind::DerivativeNonpositive;
  if (interior && kp >= env.c_upper(z, k))
    return ShotKind::DerivativeUpperViolation;
  return std::nullopt;
}

KSolution integrate_shot(const ModelParams& p, double z_star, const ShotOptions& opts) {
  if (!(z_star > 0.0) || !(opts.z_max > z_star) || !(opts.ode_tol > 0.0) || !(opts.max_step > 0.0))
    throw DomainError(ErrorKind::range, "integrate_shot needs 0 < z_star < z_max and positive tolerances");
  if (z_star > zbar_upper_bound(p) * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "z*=" << z_star << " exceeds the free-boundary bound " << zbar_upper_bound(p);
    throw DomainError(ErrorKind::range, msg.str());
  }

  const OdeCoefficients ode(p);
  const Envelopes env(p);
  const double a = p.alpha();
  const double A = env.coefficient();
  const double event_tol = opts.ode_tol;

  KSolution sol;
  sol.z_star = z_star;
  const ode::State<2> start{A * power(z_star + 1.0, a), A * a * power(z_star + 1.0, a - 1.0)};
  sol.grid.push_back(z_star);
  sol.k_values.push_back(start[0]);
  sol.kprime_values.push_back(start[1]);

  bool derivative_lost = false;
  const auto rhs = [&](double z, const ode::State<2>& u, ode::State<2>& du) {
    if (!(u[1] > 0.0)) {
      derivative_lost = true;
      return false;
    }
    du[0] = u[1];
    du[1] = ode.second_derivative(z, u[0], u[1]);
    return std::isfinite(du[1]);
  };

  const auto finish = [&](ShotKind kind, double z_event) {
    sol.classification = {kind, z_event};
    return sol;
  };

  ode::StepControl ctl;
  ctl.rtol = opts.ode_tol;
  ctl.atol = opts.ode_tol;
  ctl.max_step = opts.max_step;
  ode::DormandPrince<2> stepper(ctl, z_star, start);

  for (long steps = 0; stepper.t() < opts.z_max; ++steps) {
    if (steps > kMaxSteps)
      return finish(ShotKind::StepFailure, stepper.t());

    const double z0 = stepper.t();
    derivative_lost = false;
    const double h_min = 1e-14 * std::max(1.0, z0);
    const auto attempt = stepper.step(rhs, opts.z_max, h_min);

    if (attempt.outcome == ode::DormandPrince<2>::Outcome::step_underflow)
      return finish(ShotKind::StepFailure, z0);

    if (attempt.outcome == ode::DormandPrince<2>::Outcome::rhs_undefined) {
      // The event lies within the rejected step; shrink until it is pinned to event_tol.
      if (attempt.h <= event_tol)
        return finish(derivative_lost ? ShotKind::DerivativeNonpositive : ShotKind::BlowDown,
                      z0 + attempt.h);
      stepper.shrink(0.25);
      continue;
    }

    const double z1 = stepper.t();
    const auto& u1 = stepper.y();
    if (auto violation = classify_envelope_state(env, z1, u1[0], u1[1], z_star)) {
      const auto& dense = stepper.dense();
      double lo = z0;
      double hi = z1;
      ShotKind kind = *violation;
      while (hi - lo > event_tol) {
        const double mid = 0.5 * (lo + hi);
        const auto u = dense(mid);
        if (auto v = classify_envelope_state(env, mid, u[0], u[1], z_star)) {
          hi = mid;
          kind = *v;
        } else {
          lo = mid;
        }
      }
      if (lo > z0) {
        const auto u = dense(lo);
        sol.grid.push_back(lo);
        sol.k_values.push_back(u[0]);
        sol.kprime_values.push_back(u[1]);
      }
      return finish(kind, hi);
    }

    const double kpp = ode.second_derivative(z1, u1[0], u1[1]);
    if (!std::isfinite(kpp) || std::abs(kpp) > kBlowDownAcceleration || u1[0] < 0.0)
      return finish(ShotKind::BlowDown, z1);

    sol.grid.push_back(z1);
    sol.k_values.push_back(u1[0]);
    sol.kprime_values.push_back(u1[1]);
  }
  return finish(ShotKind::GlobalWithinBounds, opts.z_max);
}

FreeBoundary find_free_boundary(const ModelParams& p, const SolverOptions& opts) {
  if (!(opts.bisect_tol > 0.0))
    throw DomainError(ErrorKind::range, "bisect_tol must be positive");

  const double z_bar = zbar_upper_bound(p);
  int iterations = 0;
  const auto shoot = [&](double z) {
    ++iterations;
    KSolution s = integrate_shot(p, z, opts.shot);
    if (s.classification.kind == ShotKind::StepFailure) {
      std::ostringstream msg;
      msg << "step controller failed for z*=" << z << " at z=" << s.classification.z_event;
      throw StepFailure(msg.str());
    }
    return s;
  };
  const auto low_side = [](ShotKind k) { return is_below_type(k) || k == ShotKind::GlobalWithinBounds; };

  double lo = z_bar / 100.0;
  double hi = z_bar;
  const bool straddles = low_side(shoot(lo).classification.kind) &&
                         !is_below_type(shoot(hi).classification.kind);
  if (!straddles) {
    bool found = false;
    double prev_z = 0.0;
    bool prev_low = false;
    for (int i = 1; i <= kFallbackSweepPoints && !found; ++i) {
      const double z = z_bar * i / kFallbackSweepPoints;
      const ShotKind kind = shoot(z).classification.kind;
      if (prev_low && !is_below_type(kind)) {
        lo = prev_z;
        hi = z;
        found = true;
      }
      prev_low = low_side(kind);
      prev_z = z;
    }
    if (!found)
      throw NoBracket("no change of shot classification over (0, z_bar]");
  }

  for (;;) {
    const double mid = 0.5 * (lo + hi);
    KSolution shot = shoot(mid);
    const ShotKind kind = shot.classification.kind;
    const bool narrow = hi - lo <= opts.bisect_tol;
    // The last representable split: report the shot at the midpoint whatever it is.
    const bool exhausted = mid <= lo || mid >= hi;
    if ((narrow && kind == ShotKind::GlobalWithinBounds) || exhausted)
      return FreeBoundary{mid, std::move(shot), lo, hi, iterations};
    if (low_side(kind))
      lo = mid;
    else
      hi = mid;
  }
}

TruncationCheck find_free_boundary_checked(const ModelParams& p, const SolverOptions& opts) {
  FreeBoundary primary = find_free_boundary(p, opts);
  SolverOptions doubled = opts;
  doubled.shot.z_max = 2.0 * opts.shot.z_max;
  const FreeBoundary wide = find_free_boundary(p, doubled);
  TruncationCheck check{std::move(primary), wide.z_hat, wide.solution.classification.kind};
  if (!check.stable(opts.bisect_tol)) {
    std::ostringstream msg;
    msg << "free boundary moved by " << check.shift() << " when z_max was doubled to "
        << doubled.shot.z_max;
    throw Error(ErrorKind::truncation, msg.str());
  }
  return check;
}

GridResidual hjb_residual_on_grid(const ModelParams& p, const KSolution& sol) {
  const OdeCoefficients ode(p);
  const auto& z = sol.grid;
  const auto& k = sol.k_values;
  const auto& kp = sol.kprime_values;
  GridResidual out{0.0, 0.0};
  for (std::size_t i = 1; i + 1 < z.size(); ++i) {
    const double h1 = z[i] - z[i - 1];
    const double h2 = z[i + 1] - z[i];
    if (std::min(h1, h2) < kMinStencilSpacing)
      continue;
    const double kpp = -h2 / (h1 * (h1 + h2)) * kp[i - 1] + (h2 - h1) / (h1 * h2) * kp[i] +
                       h1 / (h2 * (h1 + h2)) * kp[i + 1];
    const double r = std::abs(ode.residual(z[i], k[i], kp[i], kpp));
    out.max_abs = std::max(out.max_abs, r);
    out.max_scaled = std::max(out.max_scaled, r / (std::abs(ode.discount) * k[i]));
  }
  return out;
}

namespace {

void check_candidates(const ModelParams& p, std::span<const double> z_stars, const ShotOptions& opts) {
  for (double z : z_stars) {
    if (!(z > 0.0) || !(z < opts.z_max) || z > zbar_upper_bound(p) * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "candidate z*=" << z << " outside (0, min(z_bar, z_max))";
      throw DomainError(ErrorKind::range, msg.str());
    }
  }
}

} // namespace

std::vector<KSolution> sweep_shots(const ModelParams& p, std::span<const double> z_stars,
                                   const ShotOptions& opts) {
  check_candidates(p, z_stars, opts);
  std::vector<KSolution> out(z_stars.size());
  const auto n = static_cast<long>(z_stars.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = integrate_shot(p, z_stars[static_cast<std::size_t>(i)], opts);
  return out;
}

std::vector<KSolution> sweep_shots_serial(const ModelParams& p, std::span<const double> z_stars,
                                          const ShotOptions& opts) {
  check_candidates(p, z_stars, opts);
  std::vector<KSolution> out;
  out.reserve(z_stars.size());
  for (double z : z_stars)
    out.push_back(integrate_shot(p, z, opts));
  return out;
}

} // namespace merton
