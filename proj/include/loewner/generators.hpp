#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "geometry.hpp"
#include "ode.hpp"

namespace loewner {

namespace detail {

/// Four-point complex difference quotient, O(h^4) for holomorphic f.
template <class F> cd complex_derivative(const F &f, cd z, double h) {
  return (f(z + h) - f(z - h) - I * (f(z + I * h) - f(z - I * h))) / (4.0 * h);
}

inline double fd_step(cd z) { return 1e-5 * std::max(1.0 - std::abs(z), 1e-3); }

} // namespace detail

/// An autonomous holomorphic vector field on the disc, z -> H(z).
struct FieldSpec {
  std::function<cd(cd)> eval;
  std::function<cd(cd)> derivative; // optional; finite differences are used when empty

  cd operator()(cd z) const { return eval(z); }
  cd deriv(cd z) const {
    if (derivative) return derivative(z);
    return detail::complex_derivative(eval, z, detail::fd_step(z));
  }
};

/// A time-dependent field (z, t) -> G(z, t).
struct TimeFieldSpec {
  std::function<cd(cd, double)> eval;
  std::function<cd(cd, double)> derivative; // d/dz; optional

  cd operator()(cd z, double t) const { return eval(z, t); }
  cd deriv(cd z, double t) const {
    if (derivative) return derivative(z, t);
    return detail::complex_derivative([&](cd w) { return eval(w, t); }, z, detail::fd_step(z));
  }

  /// The autonomous field z -> G(z, t) at a fixed time.
  FieldSpec frozen(double t) const {
    FieldSpec f{[g = eval, t](cd z) { return g(z, t); }, {}};
    if (derivative) f.derivative = [d = derivative, t](cd z) { return d(z, t); };
    return f;
  }

  static TimeFieldSpec autonomous(const FieldSpec &h) {
    TimeFieldSpec g{[e = h.eval](cd z, double) { return e(z); }, {}};
    if (h.derivative) g.derivative = [d = h.derivative](cd z, double) { return d(z); };
    return g;
  }
};

struct GeneratorVerdict {
  bool accepted = false;
  double max_violation = -std::numeric_limits<double>::infinity();
  cd witness{0.0, 0.0};
};

/// Concentric test grid: radii j / grid_n (j < grid_n), 4 grid_n angles each; the origin once.
/// Visits points in order of increasing radius, then increasing angle.
template <class Fn> void for_each_grid_point(std::size_t grid_n, Fn &&fn) {
  fn(cd{0.0, 0.0});
  const std::size_t n_ang = 4 * grid_n;
  for (std::size_t j = 1; j < grid_n; ++j) {
    const double r = static_cast<double>(j) / static_cast<double>(grid_n);
    for (std::size_t k = 0; k < n_ang; ++k)
      fn(std::polar(r, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_ang)));
  }
}

/// Tests Re[2 conj(z) H(z) + (1 - |z|^2) H'(z)] <= tol on the grid; the expression vanishes
/// identically for automorphism generators and is negative for strict contractions.
inline GeneratorVerdict generator_test(const FieldSpec &H, std::size_t grid_n = 32,
                                       double tol = 1e-9) {
  detail::require(grid_n >= 16, "generator_test: grid_n must be >= 16");
  GeneratorVerdict v;
  for_each_grid_point(grid_n, [&](cd z) {
    const double e = (2.0 * std::conj(z) * H(z) + (1.0 - std::norm(z)) * H.deriv(z)).real();
    if (!std::isfinite(e)) throw NumericalError("generator_test: field evaluation not finite");
    if (e > v.max_violation) {
      v.max_violation = e;
      v.witness = z;
    }
  });
  v.accepted = v.max_violation <= tol;
  return v;
}

struct AQDecomposition {
  cd a;
  FieldSpec q;
};

/// Splits H(z) = a - conj(a) z^2 - z q(z) with a = H(0).
inline AQDecomposition extract_a_q(const FieldSpec &H) {
  const cd a = H(0.0);
  FieldSpec q;
  q.eval = [H, a](cd z) {
    if (std::abs(z) < 1e-7) return -H.deriv(0.0) - std::conj(a) * z;
    return (a - std::conj(a) * z * z - H(z)) / z;
  };
  return {a, q};
}

/// Generator check through the (a, q) representation: min Re q >= -tol on the grid.
/// max_violation is the largest -Re q.
inline GeneratorVerdict aq_test(const FieldSpec &H, std::size_t grid_n = 32, double tol = 1e-8) {
  detail::require(grid_n >= 16, "aq_test: grid_n must be >= 16");
  const AQDecomposition d = extract_a_q(H);
  GeneratorVerdict v;
  for_each_grid_point(grid_n, [&](cd z) {
    const double e = -d.q(z).real();
    if (e > v.max_violation) {
      v.max_violation = e;
      v.witness = z;
    }
  });
  v.accepted = v.max_violation <= tol;
  return v;
}

// ---------------------------------------------------------------------------------------------
// Autonomous flows

namespace gen_detail {

struct InsideDisc : NoStepControl {
  template <class S> bool admissible(const S &y) const { return std::abs(y[0]) < 1.0; }
};

inline OdeOptions tight_options() {
  OdeOptions o;
  o.rel_tol = 1e-11;
  o.abs_tol = 1e-14;
  o.max_steps = 200'000;
  return o;
}

} // namespace gen_detail

/// phi_t(z) for d phi / dt = H(phi), phi_0 = z. Throws NumericalError if the orbit cannot be
/// continued inside the disc.
inline DiscPoint semigroup_point(const FieldSpec &H, DiscPoint z, double t,
                                 const OdeOptions &opt = gen_detail::tight_options()) {
  detail::require(t >= 0.0, "semigroup_point: t must be >= 0");
  const auto r =
      integrate_scalar([&](double, cd w) { return H(w); }, 0.0, t, z.value(), opt, gen_detail::InsideDisc{});
  return DiscPoint(r.y[0]);
}

inline std::vector<std::pair<cd, cd>> default_probe_pairs() {
  return {{0.0, 0.3},           {0.3, -0.2 + 0.4 * I}, {0.5 * I, -0.45 - 0.1 * I},
          {0.1 - 0.6 * I, 0.55}, {-0.5, 0.4 * I},       {0.2 + 0.2 * I, -0.3 - 0.3 * I}};
}

/// Orbit-level check: Poincare distance between paired orbits must be non-increasing on
/// [0, horizon]. Orbits that leave the disc count as an infinite violation.
/// max_violation is the largest observed increase of the distance.
inline GeneratorVerdict orbit_contraction_test(const FieldSpec &H,
                                               const std::vector<std::pair<cd, cd>> &pairs =
                                                   default_probe_pairs(),
                                               double horizon = 2.0, std::size_t samples = 20,
                                               double tol = 1e-7) {
  GeneratorVerdict v;
  v.max_violation = 0.0;
  const double dt = horizon / static_cast<double>(samples);
  for (const auto &[z0, w0] : pairs) {
    cd z = z0, w = w0;
    double dist = poincare_distance(DiscPoint(z), DiscPoint(w));
    for (std::size_t j = 0; j < samples; ++j) {
      try {
        z = semigroup_point(H, DiscPoint(z), dt).value();
        w = semigroup_point(H, DiscPoint(w), dt).value();
      } catch (const NumericalError &) {
        v.max_violation = std::numeric_limits<double>::infinity();
        v.witness = z0;
        v.accepted = false;
        return v;
      }
      const double next = poincare_distance(DiscPoint(z), DiscPoint(w));
      if (next - dist > v.max_violation) {
        v.max_violation = next - dist;
        v.witness = z0;
      }
      dist = next;
    }
  }
  v.accepted = v.max_violation <= tol;
  return v;
}

// ---------------------------------------------------------------------------------------------
// Berkson-Porta decomposition

struct DecompositionResult {
  cd tau;
  FieldSpec p;
  double residual = 0.0; // max |(tau - z)(1 - conj(tau) z) p(z) - H(z)| on the grid
  double min_re_p = 0.0; // min Re p on the grid
};

namespace gen_detail {

inline FieldSpec herglotz_factor(const FieldSpec &H, cd tau) {
  FieldSpec p;
  const bool interior = std::abs(tau) < 1.0 - 1e-9;
  const cd at_tau = interior ? -H.deriv(tau) / (1.0 - std::norm(tau)) : cd{0.0};
  p.eval = [H, tau, interior, at_tau](cd z) {
    if (interior && std::abs(z - tau) < 1e-7) return at_tau;
    return H(z) / ((tau - z) * (1.0 - std::conj(tau) * z));
  };
  return p;
}

inline double min_re_on_grid(const FieldSpec &p, std::size_t grid_n) {
  double m = std::numeric_limits<double>::infinity();
  for_each_grid_point(grid_n, [&](cd z) { m = std::min(m, p(z).real()); });
  return m;
}

inline std::vector<cd> newton_interior_zeros(const FieldSpec &H) {
  std::vector<cd> starts{0.0};
  for (double r : {0.3, 0.6, 0.85})
    for (int k = 0; k < 8; ++k) starts.push_back(std::polar(r, std::numbers::pi * k / 4.0));
  std::vector<cd> roots;
  for (cd z : starts) {
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      const cd h = H(z), d = H.deriv(z);
      if (d == 0.0 || !std::isfinite(std::abs(h))) break;
      const cd step = h / d;
      z -= step;
      if (std::abs(z) >= 1.0 - 1e-6) break;
      if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(z))) {
        ok = true;
        break;
      }
    }
    // A boundary zero pulls Newton towards the circle; only well-separated roots count.
    if (ok && std::abs(z) < 1.0 - 1e-6 && std::abs(H(z)) < 1e-10) roots.push_back(z);
  }
  return roots;
}

template <class F> double golden_min(F &&f, double a, double b, int iters = 200) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters && b - a > 1e-14; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

} // namespace gen_detail

/// Finds tau and p with H(z) = (tau - z)(1 - conj(tau) z) p(z), Re p >= 0.
/// Interior tau: multi-start Newton on H. Boundary tau: a boundary scan picks the candidate
/// whose quotient is closest to having non-negative real part, refined on |H| near the circle.
inline DecompositionResult berkson_porta(const FieldSpec &H, std::size_t boundary_grid = 720,
                                         std::size_t grid_n = 32) {
  double scale = 0.0;
  for_each_grid_point(16, [&](cd z) { scale = std::max(scale, std::abs(H(z))); });
  detail::require(scale > 1e-14, "berkson_porta: field vanishes identically");

  auto finish = [&](cd tau) {
    DecompositionResult r{tau, gen_detail::herglotz_factor(H, tau), 0.0, 0.0};
    for_each_grid_point(grid_n, [&](cd z) {
      r.residual =
          std::max(r.residual, std::abs((tau - z) * (1.0 - std::conj(tau) * z) * r.p(z) - H(z)));
    });
    r.min_re_p = gen_detail::min_re_on_grid(r.p, grid_n);
    return r;
  };
  const double admissible = -1e-8 * std::max(1.0, scale);

  // Interior candidates
  DecompositionResult best{};
  bool have = false;
  for (cd tau : gen_detail::newton_interior_zeros(H)) {
    DecompositionResult r = finish(tau);
    if (!have || r.min_re_p > best.min_re_p) {
      best = std::move(r);
      have = true;
    }
  }
  if (have && best.min_re_p >= admissible) return best;

  // Boundary candidates
  const double rho = 1.0 - 1e-7;
  std::vector<double> violation(boundary_grid), near_abs(boundary_grid);
  double vmin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < boundary_grid; ++k) {
    const double th = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(boundary_grid);
    const cd tau = std::polar(1.0, th);
    const FieldSpec p = gen_detail::herglotz_factor(H, tau);
    violation[k] = std::max(0.0, -gen_detail::min_re_on_grid(p, 16));
    near_abs[k] = std::abs(H(rho * tau));
    vmin = std::min(vmin, violation[k]);
  }
  std::size_t pick = 0;
  double best_abs = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < boundary_grid; ++k) {
    if (violation[k] <= vmin + 1e-12 * scale && near_abs[k] < best_abs) {
      best_abs = near_abs[k];
      pick = k;
    }
  }
  const double dth = 2.0 * std::numbers::pi / static_cast<double>(boundary_grid);
  const double th0 = dth * static_cast<double>(pick);
  const double th = gen_detail::golden_min(
      [&](double a) { return std::abs(H(std::polar(rho, a))); }, th0 - 2.0 * dth, th0 + 2.0 * dth);
  DecompositionResult r = finish(std::polar(1.0, th));
  if (r.min_re_p >= admissible) return r;
  if (have && best.min_re_p > r.min_re_p) r = std::move(best);
  throw NumericalError("berkson_porta: no admissible tau; best candidate (" +
                       std::to_string(r.tau.real()) + ", " + std::to_string(r.tau.imag()) +
                       ") has min Re p = " + std::to_string(r.min_re_p));
}

// ---------------------------------------------------------------------------------------------
// Herglotz vector fields and their evolution families

/// G(z, t) = (z - tau(t)) (conj(tau(t)) z - 1) p(z, t).
inline cd herglotz_eval(const std::function<cd(double)> &tau_fn,
                        const std::function<cd(cd, double)> &p_fn, cd z, double t) {
  const cd tau = tau_fn(t);
  return (z - tau) * (std::conj(tau) * z - 1.0) * p_fn(z, t);
}

inline TimeFieldSpec make_herglotz_field(std::function<cd(double)> tau_fn,
                                         std::function<cd(cd, double)> p_fn) {
  return TimeFieldSpec{[tau_fn = std::move(tau_fn), p_fn = std::move(p_fn)](cd z, double t) {
                         return herglotz_eval(tau_fn, p_fn, z, t);
                       },
                       {}};
}

struct EvolveOptions {
  OdeOptions ode = gen_detail::tight_options();
  bool validate = true;              // frozen-time generator_test before integrating
  double samples_per_unit = 32.0;
  std::size_t validation_grid = 16;
  double validation_tol = 1e-9;
};

/// Throws PreconditionError when G(., tau) fails generator_test at a sampled time in [s, t].
inline void validate_frozen(const TimeFieldSpec &G, double s, double t, const EvolveOptions &o) {
  const auto n = static_cast<std::size_t>(std::ceil((t - s) * o.samples_per_unit));
  for (std::size_t j = 0; j <= n; ++j) {
    const double tau = n == 0 ? s : s + (t - s) * static_cast<double>(j) / static_cast<double>(n);
    const GeneratorVerdict v = generator_test(G.frozen(tau), o.validation_grid, o.validation_tol);
    if (!v.accepted)
      throw PreconditionError("general_evolve: G(., " + std::to_string(tau) +
                              ") is not an infinitesimal generator (violation " +
                              std::to_string(v.max_violation) + ")");
  }
}

/// phi_{s,t}(z) for d phi / dt = G(phi, t), phi_{s,s} = id.
inline DiscPoint general_evolve(const TimeFieldSpec &G, DiscPoint z, double s, double t,
                                const EvolveOptions &o = {}) {
  detail::require(t >= s, "general_evolve: need s <= t");
  if (o.validate) validate_frozen(G, s, t, o);
  if (t == s) return z;
  const auto r = integrate_scalar([&](double tau, cd w) { return G(w, tau); }, s, t, z.value(),
                                  o.ode, gen_detail::InsideDisc{});
  return DiscPoint(r.y[0]);
}

inline std::vector<cd> default_probes() {
  return {0.3, -0.2 + 0.4 * I, 0.5 * I, -0.45 - 0.1 * I, 0.1 - 0.6 * I};
}

/// For each m: max over probes of |phi_{t,t+r/m}^{m-fold}(z) - frozen semigroup at time r|.
inline std::vector<double> product_formula_check(const TimeFieldSpec &G, double t, double r,
                                                 const std::vector<std::size_t> &m_values,
                                                 const std::vector<cd> &probes = default_probes(),
                                                 EvolveOptions o = {}) {
  detail::require(r > 0.0, "product_formula_check: r must be > 0");
  for (std::size_t j = 0; j + 1 < m_values.size(); ++j)
    detail::require(m_values[j] < m_values[j + 1], "product_formula_check: m_values must increase");
  if (o.validate) validate_frozen(G, t, t + r, o);
  o.validate = false;
  const FieldSpec frozen = G.frozen(t);
  std::vector<double> errors;
  for (std::size_t m : m_values) {
    detail::require(m >= 1, "product_formula_check: m must be >= 1");
    const double h = r / static_cast<double>(m);
    double err = 0.0;
    for (cd z : probes) {
      cd w = z;
      for (std::size_t i = 0; i < m; ++i) w = general_evolve(G, DiscPoint(w), t, t + h, o).value();
      const cd ref = semigroup_point(frozen, DiscPoint(z), r, o.ode).value();
      err = std::max(err, std::abs(w - ref));
    }
    errors.push_back(err);
  }
  return errors;
}

struct CommutationResult {
  bool commuting = false;
  double max_residual = 0.0;
};

/// max |phi_{s,t}(phi_{u,v}(z)) - phi_{u,v}(phi_{s,t}(z))| over probes and interval pairs.
inline CommutationResult commutation_check(const TimeFieldSpec &G,
                                           const std::vector<std::pair<double, double>> &intervals,
                                           const std::vector<cd> &probes = default_probes(),
                                           double threshold = 1e-8, EvolveOptions o = {}) {
  detail::require(intervals.size() >= 2, "commutation_check: need at least two intervals");
  if (o.validate)
    for (const auto &[a, b] : intervals) validate_frozen(G, a, b, o);
  o.validate = false;
  CommutationResult res;
  for (std::size_t i = 0; i < intervals.size(); ++i)
    for (std::size_t j = i + 1; j < intervals.size(); ++j) {
      const auto [s, t] = intervals[i];
      const auto [u, v] = intervals[j];
      for (cd z : probes) {
        const cd ab = general_evolve(G, general_evolve(G, DiscPoint(z), u, v, o), s, t, o);
        const cd ba = general_evolve(G, general_evolve(G, DiscPoint(z), s, t, o), u, v, o);
        res.max_residual = std::max(res.max_residual, std::abs(ab - ba));
      }
    }
  res.commuting = res.max_residual < threshold;
  return res;
}

} // namespace loewner
