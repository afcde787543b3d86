#pragma once

#include <vector>

namespace merton {

/// Piecewise cubic Hermite interpolant on strictly increasing nodes.
///
/// Node slopes are taken from the caller (exact derivative data) and then
/// limited with the Fritsch-Carlson condition so the interpolant is monotone
/// on every interval where the data are. Nodes are reproduced exactly.
class MonotoneCubic {
public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes);

  double operator()(double t) const;
  double derivative(double t) const;

  double front() const { return x_.front(); }
  double back() const { return x_.back(); }
  const std::vector<double>& slopes() const noexcept { return m_; }

private:
  std::size_t interval(double t) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> m_;
};

} // namespace merton
