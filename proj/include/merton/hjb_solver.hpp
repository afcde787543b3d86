#pragma once

#include "merton/model_core.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace merton {

/// Admissibility band for K and K' on the continuation region:
///   b_lower(z) < K(z) < b_upper(z)   and   0 < K'(z) < (alpha/z) K(z).
class Envelopes {
public:
  explicit Envelopes(const ModelParams& p);

  double b_lower(double z) const;
  double b_upper(double z) const;
  static constexpr double c_lower() { return 0.0; }
  double c_upper(double z, double k) const { return alpha_ / z * k; }

  double alpha() const noexcept { return alpha_; }
  double coefficient() const noexcept { return A_; }

private:
  double alpha_;
  double A_;
};

enum class ShotKind {
  GlobalWithinBounds,
  UpperEnvelopeViolation,
  LowerEnvelopeViolation,
  DerivativeUpperViolation,
  DerivativeNonpositive,
  BlowDown,
  StepFailure,
};

std::string_view shot_kind_name(ShotKind kind) noexcept;

/// Shots started left of the free boundary fail this way (solution grows too fast).
constexpr bool is_below_type(ShotKind k) noexcept {
  return k == ShotKind::UpperEnvelopeViolation || k == ShotKind::DerivativeUpperViolation;
}

/// Shots started right of the free boundary fail this way (solution is only local).
constexpr bool is_above_type(ShotKind k) noexcept {
  return k == ShotKind::BlowDown || k == ShotKind::LowerEnvelopeViolation ||
         k == ShotKind::DerivativeNonpositive;
}

struct ShotClassification {
  ShotKind kind;
  double z_event; // where integration stopped; z_max for GlobalWithinBounds
};

/// One integration of the free-boundary ODE from a candidate left endpoint.
struct KSolution {
  double z_star = 0.0;
  std::vector<double> grid;
  std::vector<double> k_values;
  std::vector<double> kprime_values;
  ShotClassification classification{ShotKind::StepFailure, 0.0};

  std::size_t size() const noexcept { return grid.size(); }
};

struct ShotOptions {
  double z_max = 50.0;
  double ode_tol = 1e-10;
  // Cap on the integrator step, which is also the output grid resolution.
  double max_step = 0.01;
};

struct SolverOptions {
  ShotOptions shot{};
  double bisect_tol = 1e-7;
};

struct FreeBoundary {
  double z_hat = 0.0;
  KSolution solution;
  double bracket_low = 0.0;
  double bracket_high = 0.0;
  int iterations = 0;
};

/// K'' solved from the ODE. Throws DomainError(range) when kp <= 0.
double ode_second_derivative(const ModelParams& p, double z, double k, double kp);

/// Left side of the ODE for given K, K', K''. Zero on an exact solution.
double ode_residual(const ModelParams& p, double z, double k, double kp, double kpp);

/// First violated admissibility condition at (z, K, K'), or nullopt.
/// At z <= z_star the contact conditions that hold with equality by smooth
/// pasting (lower band and derivative ceiling) are not tested.
std::optional<ShotKind> classify_envelope_state(const Envelopes& env, double z, double k, double kp,
                                                double z_star = 0.0);

/// Integrates (K, K') from z_star with smooth-pasting initial data until the
/// first envelope violation, blow-down, or z_max. Never throws for numerical
/// trouble; a collapsed step controller is reported as ShotKind::StepFailure.
KSolution integrate_shot(const ModelParams& p, double z_star, const ShotOptions& opts = {});

/// Bisection on the candidate free boundary over (0, z_bar].
/// Throws NoBracket or StepFailure.
FreeBoundary find_free_boundary(const ModelParams& p, const SolverOptions& opts = {});

/// Re-solves with z_max doubled and reports how far the free boundary moved.
struct TruncationCheck {
  FreeBoundary primary;
  double z_hat_doubled;
  ShotKind doubled_kind;
  double shift() const { return std::abs(primary.z_hat - z_hat_doubled); }
  bool stable(double bisect_tol) const {
    return doubled_kind == ShotKind::GlobalWithinBounds && shift() < bisect_tol;
  }
};

TruncationCheck find_free_boundary_checked(const ModelParams& p, const SolverOptions& opts = {});

struct GridResidual {
  double max_abs;    // max |ODE left side|
  double max_scaled; // max |ODE left side| / (|K coefficient| * K)
};

/// ODE residual at interior grid points with K'' from a three-point
/// non-uniform difference of the K' column.
GridResidual hjb_residual_on_grid(const ModelParams& p, const KSolution& sol);

/// Shoots every candidate. The OpenMP kernel and the serial reference produce
/// identical tables.
std::vector<KSolution> sweep_shots(const ModelParams& p, std::span<const double> z_stars,
                                   const ShotOptions& opts = {});
std::vector<KSolution> sweep_shots_serial(const ModelParams& p, std::span<const double> z_stars,
                                          const ShotOptions& opts = {});

} // namespace merton
