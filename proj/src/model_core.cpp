#include "merton/model_core.hpp"

#include "merton/errors.hpp"

#include <algorithm>
#include <sstream>

namespace merton {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::range: return "range";
  case ErrorKind::beta_too_small: return "beta_too_small";
  case ErrorKind::drift_condition: return "drift_condition";
  case ErrorKind::out_of_range: return "out_of_range";
  case ErrorKind::no_bracket: return "no_bracket";
  case ErrorKind::step_failure: return "step_failure";
  case ErrorKind::non_finite: return "non_finite";
  case ErrorKind::truncation: return "truncation";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::range: return 2;
  case ErrorKind::beta_too_small: return 3;
  case ErrorKind::drift_condition: return 4;
  case ErrorKind::out_of_range: return 5;
  case ErrorKind::no_bracket: return 6;
  case ErrorKind::step_failure: return 7;
  case ErrorKind::non_finite: return 8;
  case ErrorKind::truncation: return 9;
  }
  return 1;
}

ModelParams validate_params(const RawParams& raw) {
  for (double v : {raw.mu, raw.sigma, raw.mu_tilde, raw.sigma_tilde, raw.beta, raw.alpha}) {
    if (!std::isfinite(v))
      throw DomainError(ErrorKind::range, "parameters must be finite");
  }
  if (!(raw.sigma > 0.0))
    throw DomainError(ErrorKind::range, "sigma must be positive");
  if (!(raw.sigma_tilde > 0.0))
    throw DomainError(ErrorKind::range, "sigma_tilde must be positive");
  if (!(raw.alpha > 0.0 && raw.alpha < 1.0))
    throw DomainError(ErrorKind::range, "alpha must lie in (0,1)");

  const ModelParams p(raw);
  const double rate_tradable = p.alpha_moment_rate(raw.mu, raw.sigma);
  const double rate_indivisible = p.alpha_moment_rate(raw.mu_tilde, raw.sigma_tilde);
  const double beta_floor = std::max({0.0, rate_tradable, rate_indivisible});
  if (!(raw.beta > beta_floor)) {
    std::ostringstream msg;
    msg << "beta=" << raw.beta << " must exceed " << beta_floor;
    throw DomainError(ErrorKind::beta_too_small, msg.str());
  }

  const double drift_gap = raw.mu_tilde - raw.mu;
  const double lower = (raw.alpha - 1.0) * raw.sigma * raw.sigma;
  const double upper = 0.5 * (raw.alpha - 1.0) *
                       (raw.sigma * raw.sigma - raw.sigma_tilde * raw.sigma_tilde);
  if (!(lower < drift_gap && drift_gap < upper)) {
    std::ostringstream msg;
    msg << "mu_tilde-mu=" << drift_gap << " must lie strictly in (" << lower << ", " << upper << ")";
    throw DomainError(ErrorKind::drift_condition, msg.str());
  }
  return p;
}

namespace {

// (beta - mu alpha - alpha(alpha-1)sigma^2/2) / (1 - alpha); positive under validation.
double merton_bracket(const ModelParams& p) {
  return (p.beta() - p.alpha_moment_rate(p.mu(), p.sigma())) / (1.0 - p.alpha());
}

} // namespace

MertonClosedForm merton_closed_form(const ModelParams& p) {
  const double bracket = merton_bracket(p);
  return {power(bracket, p.alpha() - 1.0) / p.alpha(), bracket};
}

MertonClosedForm merton_closed_form(const RawParams& raw) {
  if (!(raw.alpha > 0.0 && raw.alpha < 1.0))
    throw DomainError(ErrorKind::range, "alpha must lie in (0,1)");
  const double rate = raw.alpha * raw.mu + 0.5 * raw.alpha * (raw.alpha - 1.0) * raw.sigma * raw.sigma;
  const double bracket = (raw.beta - rate) / (1.0 - raw.alpha);
  if (!(bracket > 0.0) || !(raw.beta > 0.0))
    throw DomainError(ErrorKind::beta_too_small, "classical problem needs beta > max{0, alpha mu + alpha(alpha-1)sigma^2/2}");
  return {power(bracket, raw.alpha - 1.0) / raw.alpha, bracket};
}

double consumption_rate_from_coefficient(const ModelParams& p, double A) {
  return power(A * p.alpha(), 1.0 / (p.alpha() - 1.0));
}

double merton_value(const ModelParams& p, double x) {
  if (!(x > 0.0))
    throw DomainError(ErrorKind::range, "wealth must be positive");
  return merton_closed_form(p).A * power(x, p.alpha());
}

double merton_hjb_residual(const ModelParams& p, double coefficient, double x) {
  const double a = p.alpha();
  const double v = coefficient * power(x, a);
  const double vx = coefficient * a * power(x, a - 1.0);
  const double vxx = coefficient * a * (a - 1.0) * power(x, a - 2.0);
  // sup over c of -c x V' + (cx)^a / a is attained at cx = (V')^(1/(a-1)).
  const double level = power(vx, 1.0 / (a - 1.0));
  const double controlled = -level * vx + power(level, a) / a;
  return -p.beta() * v + p.mu() * x * vx + 0.5 * p.sigma() * p.sigma() * x * x * vxx + controlled;
}

double merton_hjb_residual(const ModelParams& p, double x) {
  return merton_hjb_residual(p, merton_closed_form(p).A, x);
}

double zbar_upper_bound(const ModelParams& p) {
  const double s2 = p.sigma() * p.sigma();
  const double st2 = p.sigma_tilde() * p.sigma_tilde();
  const double num = p.mu() - p.mu_tilde() + 0.5 * (p.alpha() - 1.0) * (s2 - st2);
  const double den = p.mu_tilde() - p.mu() - (p.alpha() - 1.0) * s2;
  return num / den;
}

double sale_region_lhs(const ModelParams& p, double z) {
  const double s2 = p.sigma() * p.sigma();
  const double st2 = p.sigma_tilde() * p.sigma_tilde();
  const double slope = p.mu_tilde() - p.mu() - (p.alpha() - 1.0) * s2;
  return slope * z + p.mu_tilde() - p.mu() + 0.5 * (p.alpha() - 1.0) * (st2 - s2);
}

} // namespace merton
