#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

#include "driving.hpp"
#include "geometry.hpp"
#include "jet.hpp"
#include "ode.hpp"

namespace loewner {

/// Right-hand side of the forward radial equation, -w (1 + k w) / (1 - k w).
inline cd radial_field(cd w, cd k) { return -w * (1.0 + k * w) / (1.0 - k * w); }

namespace radial_detail {

/// Calls fn(a, b, k_of_t) for each smooth piece of [s, t]. On piecewise-constant drivings the
/// callable returns the frozen cell value regardless of its argument.
template <class Fn> void for_each_cell(const DrivingTerm &d, double s, double t, Fn &&fn) {
  d.check_range(s, t);
  const std::vector<double> br = d.breakpoints(s, t);
  for (std::size_t j = 0; j + 1 < br.size(); ++j) {
    const double a = br[j], b = br[j + 1];
    if (d.piecewise_constant()) {
      const cd k = d.value_at(a);
      fn(a, b, [k](double) { return k; });
    } else {
      fn(a, b, [&d](double tau) { return d.value_at(tau); });
    }
  }
}

/// Caps the step once the orbit gets within 1e-3 of the pole 1/k of the field.
template <class KFn> struct PoleGuard {
  const KFn &k;
  double swallow_eps = 0.0; // > 0 turns on early stopping near the unit circle
  template <class S> bool admissible(const S &y) const { return std::abs(y[0]) < 1.0; }
  template <class S> double max_step(double t, const S &y) const {
    const double gap = std::abs(1.0 - k(t) * y[0]);
    return gap < 1e-3 ? gap * gap : std::numeric_limits<double>::infinity();
  }
  template <class S> bool should_stop(double, const S &y) const {
    return swallow_eps > 0.0 && 1.0 - std::abs(y[0]) < swallow_eps;
  }
};


} // namespace radial_detail

struct RadialEvolutionQuery {
  DiscPoint z;
  double s = 0.0;
  double t = 0.0;
  const DrivingTerm &driving;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
};

/// phi_{s,t}(z): flow of the forward radial equation from time s to time t.
inline DiscPoint evolve(const RadialEvolutionQuery &q) {
  detail::require(q.s >= 0.0 && q.t >= q.s, "evolve: need 0 <= s <= t");
  detail::require(q.driving.codomain() == Codomain::Unimodular,
                  "evolve: radial driving must be unimodular");
  OdeOptions opt;
  opt.rel_tol = q.rel_tol;
  opt.abs_tol = q.abs_tol;
  cd w = q.z.value();
  if (w == 0.0 || q.t == q.s) return DiscPoint(w);
  radial_detail::for_each_cell(q.driving, q.s, q.t, [&](double a, double b, auto k) {
    radial_detail::PoleGuard<decltype(k)> guard{k};
    w = integrate_scalar([&](double tau, cd x) { return radial_field(x, k(tau)); }, a, b, w, opt,
                         guard)
            .y[0];
  });
  return DiscPoint(w);
}

inline DiscPoint evolve(DiscPoint z, double s, double t, const DrivingTerm &driving) {
  return evolve(RadialEvolutionQuery{z, s, t, driving});
}

namespace radial_detail {

// psi = e^{t-s} phi_{s,t} solves  d psi/dt = -2 k e^{s-t} psi^2 / (1 - k e^{s-t} psi),
// which keeps the linear coefficient exactly 1 and stays O(1) as t grows.
inline cd scaled_rhs(cd psi, cd k, double decay) {
  const cd kw = k * decay * psi;
  return -2.0 * kw * psi / (1.0 - kw);
}

inline Jet scaled_rhs(const Jet &psi, cd k, double decay) {
  const Jet kw = jet_scale(psi, k * decay);
  return jet_scale(jet_div(jet_mul(kw, psi), Jet::constant(psi.order(), 1.0) - kw), -2.0);
}

/// Integrates the scaled jet from `from` to `to` (origin time s fixed) in place.
inline void advance_scaled_jet(Jet &psi, double s, double from, double to,
                               const DrivingTerm &driving, const OdeOptions &opt) {
  using State = std::vector<cd>;
  const std::size_t order = psi.order();
  State y(psi.coeffs().begin(), psi.coeffs().end());
  for_each_cell(driving, from, to, [&](double a, double b, auto k) {
    auto rhs = [&](double tau, const State &x, State &dx) {
      const Jet r = scaled_rhs(Jet(order, x), k(tau), std::exp(s - tau));
      std::copy(r.coeffs().begin(), r.coeffs().end(), dx.begin());
    };
    y = integrate_dopri5(rhs, a, b, y, opt).y;
  });
  psi = Jet(order, y);
}

inline cd advance_scaled_point(cd psi, double s, double from, double to,
                               const DrivingTerm &driving, const OdeOptions &opt) {
  for_each_cell(driving, from, to, [&](double a, double b, auto k) {
    psi = integrate_scalar(
              [&](double tau, cd x) { return scaled_rhs(x, k(tau), std::exp(s - tau)); }, a, b,
              psi, opt)
              .y[0];
  });
  return psi;
}

} // namespace radial_detail

/// Taylor jet of phi_{s,t} at the origin, integrated in truncated-series arithmetic.
inline Jet evolve_jet(double s, double t, const DrivingTerm &driving,
                      std::size_t order = Jet::default_order, const OdeOptions &opt = {}) {
  detail::require(s >= 0.0 && t >= s, "evolve_jet: need 0 <= s <= t");
  detail::require(order >= 1, "evolve_jet: order must be >= 1");
  Jet psi = Jet::identity(order);
  if (t > s) radial_detail::advance_scaled_jet(psi, s, s, t, driving, opt);
  return jet_scale(psi, std::exp(s - t));
}

struct ChainQuery {
  DiscPoint z;
  double s = 0.0;
  const DrivingTerm &driving;
  double T_max = std::numeric_limits<double>::quiet_NaN(); // NaN: s + 60
  double tol = 1e-8;
};

struct ChainResult {
  cd value;
  double increment = 0.0; // last |e^{t+1} phi_{s,t+1} - e^t phi_{s,t}|
  double horizon = 0.0;
};

/// f_s(z) = lim e^t phi_{s,t}(z), with the horizon grown one unit at a time.
inline ChainResult chain_point(const ChainQuery &q) {
  detail::require(std::abs(q.z.value()) <= 0.9, "chain_point: |z| must be <= 0.9");
  detail::require(q.tol > 0.0, "chain_point: tol must be > 0");
  const double t_max =
      std::min(std::isnan(q.T_max) ? q.s + 60.0 : q.T_max, q.driving.horizon());
  detail::require(t_max > q.s, "chain_point: T_max must exceed s");
  OdeOptions opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-15;
  const double scale = std::exp(q.s);
  cd psi = q.z.value();
  ChainResult r{scale * psi, std::numeric_limits<double>::infinity(), q.s};
  if (psi == 0.0) return {0.0, 0.0, q.s};
  double t = q.s;
  while (t + 1.0 <= t_max + 1e-12) {
    psi = radial_detail::advance_scaled_point(psi, q.s, t, t + 1.0, q.driving, opt);
    t += 1.0;
    const cd next = scale * psi;
    r.increment = std::abs(next - r.value);
    r.value = next;
    r.horizon = t;
    if (r.increment < q.tol) return r;
  }
  throw NumericalError("chain_point: no convergence before T_max (last increment " +
                       std::to_string(r.increment) + ")");
}

// ---------------------------------------------------------------------------------------------
// Reverse radial flow

inline constexpr double radial_swallow_eps = 1e-7;

struct ReverseRadialResult {
  cd value;
  bool swallowed = false;
  double swallow_time = std::numeric_limits<double>::quiet_NaN();
};

/// g_t(z) for dg/dt = g (1 + k g) / (1 - k g), g_0 = z. Orbits move outward; an orbit that
/// comes within radial_swallow_eps of the unit circle is reported as swallowed.
inline ReverseRadialResult reverse_radial_evolve(DiscPoint z, double t, const DrivingTerm &driving,
                                                 const OdeOptions &opt = {}) {
  detail::require(t >= 0.0, "reverse_radial_evolve: t must be >= 0");
  detail::require(driving.codomain() == Codomain::Unimodular,
                  "reverse_radial_evolve: driving must be unimodular");
  ReverseRadialResult r{z.value()};
  if (r.value == 0.0 || t == 0.0) return r;
  bool done = false;
  radial_detail::for_each_cell(driving, 0.0, t, [&](double a, double b, auto k) {
    if (done) return;
    radial_detail::PoleGuard<decltype(k)> guard{k, radial_swallow_eps};
    auto res = integrate_scalar(
        [&](double tau, cd g) { return -radial_field(g, k(tau)); }, a, b, r.value, opt, guard);
    r.value = res.y[0];
    if (res.stopped && res.t < b) {
      r.swallowed = true;
      r.swallow_time = res.t;
      done = true;
    } else if (1.0 - std::abs(r.value) < radial_swallow_eps) {
      r.swallowed = true;
      r.swallow_time = b;
      done = true;
    }
  });
  return r;
}

/// Reverse radial flow driven by exp(-i sqrt(kappa) B_t).
inline ReverseRadialResult radial_sle_flow(DiscPoint z, double kappa, std::uint64_t seed, double T,
                                           std::size_t n, const OdeOptions &opt = {}) {
  return reverse_radial_evolve(z, T, radial_unimodular_from_brownian(seed, kappa, T, n), opt);
}

} // namespace loewner
