#pragma once

#include "merton/hjb_solver.hpp"
#include "merton/model_core.hpp"
#include "merton/monotone_cubic.hpp"

namespace merton {

/// Optimal sell/consume rule and value function built from a solved free boundary.
///
/// With z = x/y:
///   value        A (x+y)^alpha         for z < z_hat,  y^alpha K(z)          for z >= z_hat
///   consumption  c_rate (x+y)          for z < z_hat,  y K'(z)^(1/(alpha-1)) for z >= z_hat
///   sell         z <= z_hat
/// K and K' are monotone cubic interpolants of the solver table; queries with
/// z beyond the last tabulated ratio throw OutOfRange.
class Policy {
public:
  Policy(const ModelParams& params, FreeBoundary boundary);

  double value(double x, double y) const;
  double consumption_level(double x, double y) const;
  bool should_sell(double x, double y) const;

  /// Consumption level with z clamped to z_max instead of throwing. Sets
  /// `clamped` when the clamp was active.
  double consumption_level_clamped(double x, double y, bool& clamped) const;

  double k(double z) const;
  double kprime(double z) const;

  const ModelParams& params() const noexcept { return params_; }
  const MertonClosedForm& merton() const noexcept { return merton_; }
  const FreeBoundary& boundary() const noexcept { return boundary_; }
  double z_hat() const noexcept { return boundary_.z_hat; }
  double z_max() const noexcept { return k_.back(); }

private:
  double ratio_checked(double x, double y) const;
  double continuation_level(double y, double z) const;

  ModelParams params_;
  MertonClosedForm merton_;
  FreeBoundary boundary_;
  MonotoneCubic k_;
  MonotoneCubic kprime_;
};

} // namespace merton
