#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace loewner {

struct OdeOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double initial_step = 0.0; // 0 selects a step from the local scale of the problem
  double min_step = 1e-15;
  std::size_t max_steps = 2'000'000;
};

/// Hooks an integration may supply. The defaults admit every state and never stop early.
struct NoStepControl {
  template <class State> bool admissible(const State &) const { return true; }
  template <class State> double max_step(double, const State &) const {
    return std::numeric_limits<double>::infinity();
  }
  template <class State> bool should_stop(double, const State &) const { return false; }
};

template <class State> struct OdeResult {
  State y;
  double t = 0.0;
  bool stopped = false; // should_stop fired before reaching the end time
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

namespace detail {

template <class State> void axpy(State &out, const State &y, double h,
                                 std::initializer_list<std::pair<double, const State *>> terms) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    std::complex<double> acc = 0.0;
    for (const auto &[c, k] : terms)
      if (c != 0.0) acc += c * (*k)[i];
    out[i] = y[i] + h * acc;
  }
}

template <class State> bool all_finite(const State &y) {
  for (std::size_t i = 0; i < y.size(); ++i)
    if (!std::isfinite(y[i].real()) || !std::isfinite(y[i].imag())) return false;
  return true;
}

} // namespace detail

/// Dormand-Prince 5(4) embedded pair with FSAL and local extrapolation.
/// State is std::vector<std::complex<double>> or std::array<std::complex<double>, N>;
/// rhs(t, y, dydt) writes the derivative into dydt.
template <class State, class Rhs, class Control = NoStepControl>
OdeResult<State> integrate_dopri5(Rhs &&rhs, double t0, double t1, State y,
                                  const OdeOptions &opt = {}, const Control &control = {}) {
  detail::require(t1 >= t0, "integrate_dopri5: end time precedes start time");
  OdeResult<State> res{y, t0};
  if (t1 == t0) return res;

  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, tmp = y, ynew = y;
  double t = t0;
  rhs(t, y, k1);

  auto scale = [&](std::size_t i, const State &a, const State &b) {
    return opt.abs_tol + opt.rel_tol * std::max(std::abs(a[i]), std::abs(b[i]));
  };

  double h = opt.initial_step;
  if (h <= 0.0) {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double sc = scale(i, y, y);
      d0 = std::max(d0, std::abs(y[i]) / sc);
      d1 = std::max(d1, std::abs(k1[i]) / sc);
    }
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  }
  h = std::min(h, t1 - t0);

  while (t < t1) {
    if (res.steps + res.rejected >= opt.max_steps)
      throw NumericalError("integrate_dopri5: step budget exhausted at t = " + std::to_string(t));
    h = std::min({h, t1 - t, control.max_step(t, y)});
    if (h < opt.min_step * std::max(1.0, std::abs(t))) {
      // The last sliver before t1 may legitimately be tiny.
      if (t1 - t > opt.min_step * std::max(1.0, std::abs(t)))
        throw NumericalError("integrate_dopri5: step size underflow at t = " + std::to_string(t));
      h = t1 - t;
    }

    detail::axpy(tmp, y, h, {{a21, &k1}});
    rhs(t + c2 * h, tmp, k2);
    detail::axpy(tmp, y, h, {{a31, &k1}, {a32, &k2}});
    rhs(t + c3 * h, tmp, k3);
    detail::axpy(tmp, y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
    rhs(t + c4 * h, tmp, k4);
    detail::axpy(tmp, y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    rhs(t + c5 * h, tmp, k5);
    detail::axpy(tmp, y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    rhs(t + h, tmp, k6);
    detail::axpy(ynew, y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const double t_new = (t1 - t - h <= 0.0) ? t1 : t + h;

    bool ok = detail::all_finite(ynew) && control.admissible(ynew);
    double err = 0.0;
    if (ok) {
      rhs(t_new, ynew, k7);
      for (std::size_t i = 0; i < y.size(); ++i) {
        const std::complex<double> e =
            h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        err = std::max(err, std::abs(e) / scale(i, y, ynew));
      }
      ok = std::isfinite(err);
    }

    if (!ok) {
      ++res.rejected;
      h *= 0.25;
      continue;
    }
    if (err <= 1.0) {
      t = t_new;
      y = ynew;
      k1 = k7;
      ++res.steps;
      if (control.should_stop(t, y)) {
        res.stopped = true;
        break;
      }
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h *= fac;
    } else {
      ++res.rejected;
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
    }
  }
  res.y = y;
  res.t = t;
  return res;
}

/// Scalar convenience wrapper over a one-component state.
template <class Rhs, class Control = NoStepControl>
OdeResult<std::array<std::complex<double>, 1>>
integrate_scalar(Rhs &&rhs, double t0, double t1, std::complex<double> y0,
                 const OdeOptions &opt = {}, const Control &control = {}) {
  using S = std::array<std::complex<double>, 1>;
  return integrate_dopri5(
      [&](double t, const S &y, S &dy) { dy[0] = rhs(t, y[0]); }, t0, t1, S{y0}, opt, control);
}

} // namespace loewner
