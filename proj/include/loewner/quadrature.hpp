#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"

namespace loewner {

struct QuadratureResult {
  std::complex<double> value;
  double error_estimate = 0.0;
};

namespace detail {

struct Panel {
  std::complex<double> value;
  double error = 0.0;
  double l1 = 0.0;
};

/// One Gauss-Kronrod 7/15 panel on [a, b], evaluated on [-1, 1] and rescaled.
template <class F> Panel gk15_panel(F &f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  auto g = [&](double x) -> std::complex<double> { return f(mid + half * x); };
  double err = 0.0, l1 = 0.0;
  const std::complex<double> v = GK::integrate(g, -1.0, 1.0, 0, 0.0, &err, &l1);
  return {half * v, half * err, half * l1};
}

template <class F>
void gk15_adaptive(F &f, double a, double b, double tol, unsigned depth, Panel &acc) {
  const Panel p = gk15_panel(f, a, b);
  if (p.error <= tol || p.error <= 50.0 * std::numeric_limits<double>::epsilon() * p.l1 ||
      depth == 0) {
    acc.value += p.value;
    acc.error += p.error;
    acc.l1 += p.l1;
    return;
  }
  const double mid = 0.5 * (a + b);
  gk15_adaptive(f, a, mid, 0.5 * tol, depth - 1, acc);
  gk15_adaptive(f, mid, b, 0.5 * tol, depth - 1, acc);
}

} // namespace detail

/// Adaptive Gauss-Kronrod (7/15) quadrature of a complex integrand over [a, b], bisecting
/// until each panel meets its share of abs_tol.
template <class F>
QuadratureResult integrate_gk15(F &&f, double a, double b, double abs_tol = 1e-10,
                                unsigned max_depth = 30) {
  if (a == b) return {0.0, 0.0};
  detail::require(a < b, "integrate_gk15: a must not exceed b");
  detail::Panel acc;
  detail::gk15_adaptive(f, a, b, abs_tol, max_depth, acc);
  if (acc.error > 10.0 * abs_tol + 1e3 * std::numeric_limits<double>::epsilon() * acc.l1)
    throw NumericalError("integrate_gk15: tolerance not met on [" + std::to_string(a) + ", " +
                         std::to_string(b) + "]");
  return {acc.value, acc.error};
}

/// Integrates panel by panel between consecutive breakpoints so that discontinuities of the
/// integrand never sit inside a panel.
template <class F>
QuadratureResult integrate_gk15_breaks(F &&f, std::span<const double> breaks,
                                       double abs_tol = 1e-10) {
  QuadratureResult total{0.0, 0.0};
  if (breaks.size() < 2) return total;
  const double span = breaks.back() - breaks.front();
  for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
    const double w = (breaks[j + 1] - breaks[j]) / span;
    auto r = integrate_gk15(f, breaks[j], breaks[j + 1], abs_tol * w);
    total.value += r.value;
    total.error_estimate += r.error_estimate;
  }
  return total;
}

} // namespace loewner
