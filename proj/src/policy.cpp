#include "merton/policy.hpp"

#include "merton/errors.hpp"

#include <sstream>

namespace merton {

namespace {

MonotoneCubic kprime_interpolant(const ModelParams& p, const KSolution& sol) {
  std::vector<double> kpp(sol.size());
  for (std::size_t i = 0; i < sol.size(); ++i)
    kpp[i] = ode_second_derivative(p, sol.grid[i], sol.k_values[i], sol.kprime_values[i]);
  return MonotoneCubic(sol.grid, sol.kprime_values, std::move(kpp));
}

} // namespace

Policy::Policy(const ModelParams& params, FreeBoundary boundary)
    : params_(params), merton_(merton_closed_form(params)), boundary_(std::move(boundary)),
      k_(boundary_.solution.grid, boundary_.solution.k_values, boundary_.solution.kprime_values),
      kprime_(kprime_interpolant(params_, boundary_.solution)) {}

double Policy::ratio_checked(double x, double y) const {
  if (!(x > 0.0) || !(y > 0.0))
    throw DomainError(ErrorKind::range, "wealth and asset value must be positive");
  const double z = x / y;
  if (z > z_max()) {
    std::ostringstream msg;
    msg << "ratio x/y=" << z << " exceeds tabulated z_max=" << z_max();
    throw OutOfRange(msg.str());
  }
  return z;
}

double Policy::k(double z) const {
  if (z < k_.front() || z > k_.back()) {
    std::ostringstream msg;
    msg << "z=" << z << " outside [" << k_.front() << ", " << k_.back() << "]";
    throw OutOfRange(msg.str());
  }
  return k_(z);
}

double Policy::kprime(double z) const {
  if (z < kprime_.front() || z > kprime_.back()) {
    std::ostringstream msg;
    msg << "z=" << z << " outside [" << kprime_.front() << ", " << kprime_.back() << "]";
    throw OutOfRange(msg.str());
  }
  return kprime_(z);
}

double Policy::value(double x, double y) const {
  const double z = ratio_checked(x, y);
  const double a = params_.alpha();
  if (z < z_hat())
    return merton_.A * power(x + y, a);
  return power(y, a) * k_(z);
}

double Policy::continuation_level(double y, double z) const {
  return y * power(kprime_(z), 1.0 / (params_.alpha() - 1.0));
}

double Policy::consumption_level(double x, double y) const {
  const double z = ratio_checked(x, y);
  if (z < z_hat())
    return merton_.c_rate * (x + y);
  return continuation_level(y, z);
}

double Policy::consumption_level_clamped(double x, double y, bool& clamped) const {
  const double z = x / y;
  clamped = z > z_max();
  if (z < z_hat())
    return merton_.c_rate * (x + y);
  return continuation_level(y, clamped ? z_max() : z);
}

bool Policy::should_sell(double x, double y) const {
  if (!(x > 0.0) || !(y > 0.0))
    throw DomainError(ErrorKind::range, "wealth and asset value must be positive");
  return x / y <= z_hat();
}

} // namespace merton
