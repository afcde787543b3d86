#include "merton/monotone_cubic.hpp"

#include "merton/errors.hpp"

#include <algorithm>
#include <cmath>

namespace merton {

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes)
    : x_(std::move(x)), y_(std::move(y)), m_(std::move(slopes)) {
  if (x_.size() < 2 || y_.size() != x_.size() || m_.size() != x_.size())
    throw DomainError(ErrorKind::range, "interpolant needs at least two nodes with matching data");
  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    if (!(x_[i + 1] > x_[i]))
      throw DomainError(ErrorKind::range, "interpolation nodes must be strictly increasing");
  }

  for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
    const double delta = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    if (delta == 0.0) {
      m_[i] = 0.0;
      m_[i + 1] = 0.0;
      continue;
    }
    // Slopes opposing the secant would create an extremum inside the interval.
    if (m_[i] * delta < 0.0)
      m_[i] = 0.0;
    if (m_[i + 1] * delta < 0.0)
      m_[i + 1] = 0.0;
    const double a = m_[i] / delta;
    const double b = m_[i + 1] / delta;
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      m_[i] = tau * a * delta;
      m_[i + 1] = tau * b * delta;
    }
  }
}

std::size_t MonotoneCubic::interval(double t) const {
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  const auto idx = static_cast<std::size_t>(std::distance(x_.begin(), it));
  return std::clamp<std::size_t>(idx, 1, x_.size() - 1) - 1;
}

double MonotoneCubic::operator()(double t) const {
  const std::size_t i = interval(t);
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

double MonotoneCubic::derivative(double t) const {
  const std::size_t i = interval(t);
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  const double s2 = s * s;
  const double d00 = (6.0 * s2 - 6.0 * s) / h;
  const double d10 = 3.0 * s2 - 4.0 * s + 1.0;
  const double d01 = (-6.0 * s2 + 6.0 * s) / h;
  const double d11 = 3.0 * s2 - 2.0 * s;
  return d00 * y_[i] + d10 * m_[i] + d01 * y_[i + 1] + d11 * m_[i + 1];
}

} // namespace merton
