#pragma once

#include <cmath>

namespace merton {

/// x^e for x > 0, evaluated as exp(e * ln x) so that fractional and negative
/// exponents behave identically everywhere in the library.
inline double power(double base, double exponent) {
  return std::exp(exponent * std::log(base));
}

/// Unvalidated market constants as read from a config file or the command line.
struct RawParams {
  double mu = 1.0;
  double sigma = 1.0;
  double mu_tilde = 0.5;
  double sigma_tilde = 0.5;
  double beta = 2.0;
  double alpha = 1.0 / 3.0;
};

/// Market constants that have passed every standing assumption.
///
/// Only validate_params() can build one, so holding a ModelParams is proof that
///   sigma, sigma_tilde > 0 and 0 < alpha < 1,
///   beta > max{0, alpha*mu + alpha(alpha-1)sigma^2/2, alpha*mu_tilde + alpha(alpha-1)sigma_tilde^2/2},
///   (alpha-1)sigma^2 < mu_tilde - mu < (alpha-1)(sigma^2 - sigma_tilde^2)/2.
class ModelParams {
public:
  double mu() const noexcept { return raw_.mu; }
  double sigma() const noexcept { return raw_.sigma; }
  double mu_tilde() const noexcept { return raw_.mu_tilde; }
  double sigma_tilde() const noexcept { return raw_.sigma_tilde; }
  double beta() const noexcept { return raw_.beta; }
  double alpha() const noexcept { return raw_.alpha; }

  const RawParams& raw() const noexcept { return raw_; }

  /// alpha*m + alpha(alpha-1)s^2/2, the exponential growth rate of E[S_t^alpha] for a GBM(m, s).
  double alpha_moment_rate(double drift, double vol) const noexcept {
    return alpha() * drift + 0.5 * alpha() * (alpha() - 1.0) * vol * vol;
  }

private:
  friend ModelParams validate_params(const RawParams& raw);
  explicit ModelParams(const RawParams& raw) : raw_(raw) {}

  RawParams raw_;
};

/// Checks every invariant strictly (no slack at equality points).
/// Throws DomainError with kind range, beta_too_small or drift_condition.
ModelParams validate_params(const RawParams& raw);

/// Solution of the classical problem that applies once the asset is sold.
struct MertonClosedForm {
  double A;       // V(x) = A x^alpha
  double c_rate;  // optimal proportional consumption rate
};

MertonClosedForm merton_closed_form(const ModelParams& p);

/// Closed form for parameters that only satisfy the classical-problem
/// conditions (0 < alpha < 1 and a positive consumption bracket), e.g. in the
/// divergent regime of the modified problem. Throws DomainError otherwise.
MertonClosedForm merton_closed_form(const RawParams& raw);

/// The same c_rate computed from (A alpha)^(1/(alpha-1)) instead of the bracket.
double consumption_rate_from_coefficient(const ModelParams& p, double A);

/// A x^alpha. Throws DomainError(range) for x <= 0.
double merton_value(const ModelParams& p, double x);

/// -beta V + sup_c {(mu - c) x V' + sigma^2 x^2 V''/2 + (cx)^alpha/alpha} at V = coefficient * x^alpha.
double merton_hjb_residual(const ModelParams& p, double coefficient, double x);

/// Residual with the true coefficient A; zero up to rounding.
double merton_hjb_residual(const ModelParams& p, double x);

/// Largest ratio x/y at which selling can satisfy the stopping-region inequality.
double zbar_upper_bound(const ModelParams& p);

/// Left side of the stopping-region inequality in terms of z = x/y.
/// A nonpositive value certifies the sale region condition at z.
double sale_region_lhs(const ModelParams& p, double z);

} // namespace merton
