#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "driving.hpp"
#include "geometry.hpp"
#include "ode.hpp"

namespace loewner {

inline constexpr double chordal_swallow_eps = 1e-7;

/// One cell of a piecewise-constant chordal driving: value xi held for `delta` time units.
struct ChordalStep {
  double xi = 0.0;
  double delta = 0.0;
};

namespace chordal_detail {

// Root of x continuing the identity: Im >= 0, and on the real axis the sign of Re(u).
inline cd branch_sqrt(cd x, cd u) {
  const double m = std::sqrt(x.real() * x.real() + x.imag() * x.imag());
  if (m == 0.0) return 0.0;
  const double h = std::sqrt(0.5 * (m + std::abs(x.real())));
  cd r = x.real() >= 0.0 ? cd{h, 0.5 * x.imag() / h} : cd{0.5 * std::abs(x.imag()) / h, std::copysign(h, x.imag())};
  if (r.imag() < 0.0 || (r.imag() == 0.0 && r.real() * u.real() < 0.0)) r = -r;
  return r;
}

/// Composition of exact down steps over cells (xi[j], delta[j]) for j = count - 1, ..., 0.
inline cd down_cells(cd w, const double *xi, const double *delta, std::size_t count) {
  for (std::size_t j = count; j-- > 0;) {
    const cd u = w - xi[j];
    w = xi[j] + branch_sqrt(u * u - 4.0 * delta[j], u);
  }
  return w;
}

inline OdeOptions flow_options() {
  OdeOptions o;
  o.rel_tol = 1e-10;
  o.abs_tol = 1e-13;
  return o;
}

// Offset-form guards: the state is d = g - base.
struct UpGuard : NoStepControl {
  const DrivingTerm &d;
  cd base;
  template <class S> bool admissible(const S &y) const { return (base + y[0]).imag() > 0.0; }
  template <class S> bool should_stop(double t, const S &y) const {
    return std::abs(base + y[0] - d.value_at(t)) < chordal_swallow_eps;
  }
};

struct DownGuard : NoStepControl {
  cd base;
  template <class S> bool admissible(const S &y) const { return (base + y[0]).imag() >= 0.0; }
};

inline void check_step(const ChordalStep &s) {
  detail::require(s.delta >= 0.0, "chordal step: delta must be >= 0");
}

} // namespace chordal_detail

/// Exact solution of dg/dt = 2 / (g - xi) over `delta`: xi + sqrt((w - xi)^2 + 4 delta).
inline cd up_step(cd w, ChordalStep step) {
  chordal_detail::check_step(step);
  detail::require(w.imag() >= 0.0, "up_step: w must lie in the closed upper half-plane");
  if (step.delta == 0.0) return w;
  const cd u = w - step.xi;
  detail::require(u != 0.0, "up_step: w coincides with the driving value");
  return step.xi + chordal_detail::branch_sqrt(u * u + 4.0 * step.delta, u);
}

/// Exact solution of dw/dt = -2 / (w - xi) over `delta`; the inverse of up_step.
inline cd down_step(cd w, ChordalStep step) {
  chordal_detail::check_step(step);
  detail::require(w.imag() >= 0.0, "down_step: w must lie in the closed upper half-plane");
  if (step.delta == 0.0) return w;
  const cd u = w - step.xi;
  detail::require(u != 0.0, "down_step: w coincides with the driving value");
  return step.xi + chordal_detail::branch_sqrt(u * u - 4.0 * step.delta, u);
}

struct UpwardResult {
  cd value;
  bool swallowed = false;
  double swallow_time = std::numeric_limits<double>::quiet_NaN();
};

/// g_T(z) for the hull-removing flow dg/dt = 2 / (g - k(t)), g_0 = z.
/// Piecewise-constant drivings are composed from exact steps; others are integrated.
inline UpwardResult solve_upward(cd z, double T, const DrivingTerm &driving,
                                 const OdeOptions &opt = chordal_detail::flow_options()) {
  detail::require(z.imag() > 0.0, "solve_upward: Im z must be > 0");
  detail::require(T >= 0.0, "solve_upward: T must be >= 0");
  detail::require(driving.codomain() == Codomain::Real, "solve_upward: driving must be real");
  driving.check_range(0.0, T);
  UpwardResult r{z};
  const std::vector<double> br = driving.breakpoints(0.0, T);
  for (std::size_t j = 0; j + 1 < br.size(); ++j) {
    const double a = br[j], b = br[j + 1];
    if (driving.piecewise_constant()) {
      const double xi = driving.real_value_at(a);
      const cd u = r.value - xi;
      const cd g = up_step(r.value, {xi, b - a});
      // A point on the vertical ray above xi is absorbed after Im(u)^2 / 4.
      if (g.imag() <= chordal_swallow_eps && std::abs(u.real()) <= chordal_swallow_eps) {
        r.value = xi;
        r.swallowed = true;
        r.swallow_time = std::min(b, a + 0.25 * u.imag() * u.imag());
        return r;
      }
      r.value = g;
      if (std::abs(g - xi) < chordal_swallow_eps) {
        r.swallowed = true;
        r.swallow_time = b;
        return r;
      }
      continue;
    }
    // Offset form d = g - g_a keeps the relative tolerance meaningful for large |g|.
    const cd base = r.value;
    const chordal_detail::UpGuard guard{{}, driving, base};
    auto res = integrate_scalar(
        [&](double t, cd d) { return 2.0 / (base + d - driving.value_at(t)); }, a, b, cd{0.0},
        opt, guard);
    r.value = base + res.y[0];
    if (res.stopped) {
      r.swallowed = true;
      r.swallow_time = res.t;
      return r;
    }
  }
  return r;
}

/// f_t(z) = g_t^{-1}(z): the downward flow dw/ds = -2 / (w - k(t - s)) run for time t.
inline cd inverse_map(cd z, double t, const DrivingTerm &driving,
                      const OdeOptions &opt = chordal_detail::flow_options()) {
  detail::require(z.imag() >= 0.0, "inverse_map: z must lie in the closed upper half-plane");
  detail::require(t >= 0.0, "inverse_map: t must be >= 0");
  detail::require(driving.codomain() == Codomain::Real, "inverse_map: driving must be real");
  driving.check_range(0.0, t);
  cd w = z;
  const std::vector<double> br = driving.breakpoints(0.0, t);
  if (driving.piecewise_constant()) {
    std::vector<double> xi(br.size() - 1), delta(br.size() - 1);
    for (std::size_t j = 0; j + 1 < br.size(); ++j) {
      xi[j] = driving.real_value_at(br[j]);
      delta[j] = br[j + 1] - br[j];
    }
    return chordal_detail::down_cells(w, xi.data(), delta.data(), xi.size());
  }
  for (std::size_t j = br.size() - 1; j-- > 0;) {
    const double a = br[j], b = br[j + 1];
    // Cell [a, b] of driving time is traversed in reversed time sigma = t - tau.
    const cd base = w;
    const chordal_detail::DownGuard guard{{}, base};
    w = base + integrate_scalar(
                   [&](double sigma, cd d) {
                     return -2.0 / (base + d - driving.value_at(t - sigma));
                   },
                   t - b, t - a, cd{0.0}, opt, guard)
                   .y[0];
  }
  return w;
}

/// Time-stamped samples of a hull-generating curve in the closed upper half-plane.
struct TracePolyline {
  std::vector<double> times;
  std::vector<cd> points;
  std::vector<bool> valid; // false where the backward flow failed for that sample
};

inline double default_trace_offset(double T) { return 1e-6 * std::max(1.0, std::sqrt(T)); }

/// gamma(t_j) on t_j = j T / n, each point the image of k(t_j-) + i y0 under f_{t_j}.
inline TracePolyline trace(double T, std::size_t n, const DrivingTerm &driving,
                           std::optional<double> y0 = std::nullopt) {
  detail::require(n >= 1, "trace: n must be >= 1");
  detail::require(T > 0.0, "trace: T must be > 0");
  const double offset = y0.value_or(default_trace_offset(T));
  detail::require(offset > 0.0, "trace: y0 must be > 0");
  detail::require(driving.codomain() == Codomain::Real, "trace: driving must be real");
  driving.check_range(0.0, T);
  TracePolyline out;
  out.times.resize(n + 1);
  out.points.resize(n + 1);
  out.valid.assign(n + 1, true);
  // Piecewise-constant drivings share one cell list; the result matches inverse_map exactly.
  std::vector<double> br, xi, delta;
  if (driving.piecewise_constant()) {
    br = driving.breakpoints(0.0, T);
    br.pop_back();
    for (std::size_t i = 0; i < br.size(); ++i) {
      xi.push_back(driving.real_value_at(br[i]));
      delta.push_back((i + 1 < br.size() ? br[i + 1] : T) - br[i]);
    }
  }
  for (std::size_t j = 0; j <= n; ++j) {
    const double t = j == n ? T : T * static_cast<double>(j) / static_cast<double>(n);
    out.times[j] = t;
    const cd seed{driving.left_value(t).real(), offset};
    try {
      cd p;
      if (driving.piecewise_constant()) {
        const auto m = static_cast<std::size_t>(std::lower_bound(br.begin(), br.end(), t) - br.begin());
        const double full = m > 0 ? delta[m - 1] : 0.0;
        if (m > 0) delta[m - 1] = t - br[m - 1];
        p = chordal_detail::down_cells(seed, xi.data(), delta.data(), m);
        if (m > 0) delta[m - 1] = full;
      } else {
        p = inverse_map(seed, t, driving);
      }
      if (!std::isfinite(p.real()) || !std::isfinite(p.imag()) || p.imag() < 0.0)
        throw NumericalError("trace: non-finite point");
      out.points[j] = p;
    } catch (const NumericalError &) {
      out.points[j] = seed;
      out.valid[j] = false;
    }
  }
  return out;
}

/// Chordal SLE_kappa trace: driving sqrt(kappa) B_t on an n-cell grid, started at 0.
inline TracePolyline chordal_sle_trace(double kappa, std::uint64_t seed, double T, std::size_t n,
                                       std::optional<double> y0 = std::nullopt) {
  return trace(T, n, brownian_driving(seed, kappa, T, n, 0.0), y0);
}

struct CapacityFit {
  double c = 0.0;        // fitted coefficient in f_t(z) ~ z + c / z
  double residual = 0.0; // rms of f_t(z) - z - c / z over the probes
};

/// Least-squares fit of c in f_t(z) ~ z + c / z over probes z = R e^{i theta}, theta in (0, pi).
inline CapacityFit hcap_fit(double t, const DrivingTerm &driving, double R = 1000.0,
                            std::size_t m = 16) {
  detail::require(R >= 100.0, "hcap_estimate: R must be >= 100");
  detail::require(m >= 4, "hcap_estimate: need at least 4 probe angles");
  std::vector<cd> probes(m), dev(m);
  for (std::size_t j = 0; j < m; ++j) {
    probes[j] = std::polar(R, std::numbers::pi * (static_cast<double>(j) + 0.5) /
                                  static_cast<double>(m));
    dev[j] = inverse_map(probes[j], t, driving) - probes[j];
  }
  cd num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const cd basis = 1.0 / probes[j];
    num += std::conj(basis) * dev[j];
    den += std::norm(basis);
  }
  CapacityFit fit{(num / den).real(), 0.0};
  double ss = 0.0;
  for (std::size_t j = 0; j < m; ++j) ss += std::norm(dev[j] - fit.c / probes[j]);
  fit.residual = std::sqrt(ss / static_cast<double>(m));
  return fit;
}

/// Half-plane capacity coefficient c(t) (equal to -2t under the hydrodynamic normalization).
inline double hcap_estimate(double t, const DrivingTerm &driving, double R = 1000.0,
                            std::size_t m = 16) {
  const CapacityFit fit = hcap_fit(t, driving, R, m);
  // The c / z term must dominate what is left over.
  if (fit.residual > 0.1 * std::abs(fit.c) / R + 1e-12 * R)
    throw NumericalError("hcap_estimate: fit residual too large");
  return fit.c;
}

struct RayFit {
  double angle = 0.0;         // direction of the best line through the origin
  double max_rel_dev = 0.0;   // max over points of distance-to-line / |point|
};

/// Total-least-squares line through the origin for the valid points with |p| > min_modulus.
inline RayFit fit_ray_through_origin(const TracePolyline &tr, double min_modulus = 0.0) {
  cd acc = 0.0;
  for (std::size_t j = 0; j < tr.points.size(); ++j)
    if (tr.valid[j] && std::abs(tr.points[j]) > min_modulus) acc += tr.points[j] * tr.points[j];
  RayFit fit{0.5 * std::arg(acc), 0.0};
  const cd dir = std::polar(1.0, -fit.angle);
  for (std::size_t j = 0; j < tr.points.size(); ++j) {
    const double r = std::abs(tr.points[j]);
    if (!tr.valid[j] || r <= min_modulus || r == 0.0) continue;
    fit.max_rel_dev = std::max(fit.max_rel_dev, std::abs((tr.points[j] * dir).imag()) / r);
  }
  return fit;
}

} // namespace loewner
