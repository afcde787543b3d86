#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>

namespace merton::ode {

template <std::size_t N>
using State = std::array<double, N>;

/// Continuous extension of one accepted Dormand-Prince step (4th order).
template <std::size_t N>
class DenseStep {
public:
  DenseStep() = default;
  DenseStep(double t0, double h, const std::array<State<N>, 5>& coeffs)
      : t0_(t0), h_(h), r_(coeffs) {}

  double t0() const noexcept { return t0_; }
  double t1() const noexcept { return t0_ + h_; }

  State<N> operator()(double t) const {
    const double theta = (t - t0_) / h_;
    const double theta1 = 1.0 - theta;
    State<N> y{};
    for (std::size_t i = 0; i < N; ++i)
      y[i] = r_[0][i] + theta * (r_[1][i] + theta1 * (r_[2][i] + theta * (r_[3][i] + theta1 * r_[4][i])));
    return y;
  }

private:
  double t0_ = 0.0;
  double h_ = 1.0;
  std::array<State<N>, 5> r_{};
};

struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-10;
  double max_step = 0.01;
  double initial_step = 1e-3;
  double safety = 0.9;
  double min_factor = 0.2;   // largest shrink is 1/5
  double max_factor = 10.0;  // largest growth
  double pi_beta = 0.04;     // Gustafsson PI stabilisation
};

/// Explicit Runge-Kutta 5(4) pair of Dormand and Prince with PI step-size
/// control and dense output, advanced one accepted step at a time so that the
/// caller can inspect every step for events.
///
/// The right-hand side has signature `bool rhs(double t, const State<N>&, State<N>& dydt)`;
/// returning false marks the stage as undefined and the attempt is rejected.
template <std::size_t N>
class DormandPrince {
public:
  enum class Outcome { accepted, rhs_undefined, step_underflow };

  struct Attempt {
    Outcome outcome;
    double h; // step size tried last
  };

  DormandPrince(StepControl control, double t0, const State<N>& y0)
      : ctl_(control), t_(t0), y_(y0), h_(std::min(control.initial_step, control.max_step)) {}

  double t() const noexcept { return t_; }
  const State<N>& y() const noexcept { return y_; }
  const DenseStep<N>& dense() const noexcept { return dense_; }
  double next_step() const noexcept { return h_; }

  /// Shrinks the proposed step (used after an undefined stage).
  void shrink(double factor) noexcept { h_ *= factor; }

  /// Tries steps until one is accepted, the right-hand side is undefined on a
  /// stage, or the step falls below h_min. Never steps past t_end.
  template <class Rhs>
  Attempt step(Rhs&& rhs, double t_end, double h_min) {
    if (!have_k1_) {
      if (!rhs(t_, y_, k1_))
        return {Outcome::rhs_undefined, h_};
      have_k1_ = true;
    }
    for (;;) {
      double h = std::min(h_, ctl_.max_step);
      bool last = false;
      if (t_ + h >= t_end) {
        h = t_end - t_;
        last = true;
      } else if (t_ + 1.5 * h >= t_end) {
        h = 0.5 * (t_end - t_); // no sliver steps before t_end
      }
      if (h < h_min)
        return {Outcome::step_underflow, h};

      State<N> k2, k3, k4, k5, k6, k7, ytmp, ynew;
      const auto combine = [&](std::initializer_list<std::pair<double, const State<N>*>> terms) {
        for (std::size_t i = 0; i < N; ++i) {
          double acc = 0.0;
          for (const auto& [c, k] : terms)
            acc += c * (*k)[i];
          ytmp[i] = y_[i] + h * acc;
        }
      };

      combine({{a21, &k1_}});
      if (!rhs(t_ + c2 * h, ytmp, k2)) { h_ = h; return {Outcome::rhs_undefined, h}; }
      combine({{a31, &k1_}, {a32, &k2}});
      if (!rhs(t_ + c3 * h, ytmp, k3)) { h_ = h; return {Outcome::rhs_undefined, h}; }
      combine({{a41, &k1_}, {a42, &k2}, {a43, &k3}});
      if (!rhs(t_ + c4 * h, ytmp, k4)) { h_ = h; return {Outcome::rhs_undefined, h}; }
      combine({{a51, &k1_}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
      if (!rhs(t_ + c5 * h, ytmp, k5)) { h_ = h; return {Outcome::rhs_undefined, h}; }
      combine({{a61, &k1_}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
      if (!rhs(t_ + h, ytmp, k6)) { h_ = h; return {Outcome::rhs_undefined, h}; }
      for (std::size_t i = 0; i < N; ++i)
        ynew[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
      const double t_new = last ? t_end : t_ + h;
      if (!rhs(t_new, ynew, k7)) { h_ = h; return {Outcome::rhs_undefined, h}; }

      double err2 = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double e = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sk = ctl_.atol + ctl_.rtol * std::max(std::abs(y_[i]), std::abs(ynew[i]));
        err2 += (e / sk) * (e / sk);
      }
      const double err = std::sqrt(err2 / static_cast<double>(N));
      if (!std::isfinite(err)) {
        h_ = h * ctl_.min_factor;
        continue;
      }

      const double expo = 0.2 - 0.75 * ctl_.pi_beta;
      const double fac11 = std::pow(err, expo);
      if (err <= 1.0) {
        double fac = fac11 / std::pow(err_old_, ctl_.pi_beta);
        fac = std::clamp(fac / ctl_.safety, 1.0 / ctl_.max_factor, 1.0 / ctl_.min_factor);
        err_old_ = std::max(err, 1e-4);

        std::array<State<N>, 5> r;
        for (std::size_t i = 0; i < N; ++i) {
          const double ydiff = ynew[i] - y_[i];
          const double bspl = h * k1_[i] - ydiff;
          r[0][i] = y_[i];
          r[1][i] = ydiff;
          r[2][i] = bspl;
          r[3][i] = ydiff - h * k7[i] - bspl;
          r[4][i] = h * (d1 * k1_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        dense_ = DenseStep<N>(t_, h, r);
        t_ = t_new;
        y_ = ynew;
        k1_ = k7;
        h_ = std::min(h / fac, ctl_.max_step);
        return {Outcome::accepted, h};
      }
      h_ = h / std::min(1.0 / ctl_.min_factor, fac11 / ctl_.safety);
    }
  }

private:
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  StepControl ctl_;
  double t_;
  State<N> y_;
  double h_;
  double err_old_ = 1e-4;
  State<N> k1_{};
  bool have_k1_ = false;
  DenseStep<N> dense_{};
};

} // namespace merton::ode
