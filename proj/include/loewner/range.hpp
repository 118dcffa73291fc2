#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "generators.hpp"
#include "geometry.hpp"
#include "ode.hpp"

namespace loewner {

enum class RangeClass { Plane, Disc, Undetermined };

inline const char *to_string(RangeClass c) {
  switch (c) {
  case RangeClass::Plane:
    return "Plane";
  case RangeClass::Disc:
    return "Disc";
  default:
    return "Undetermined";
  }
}

struct RangeProbe {
  double s = 0.0;
  cd z{0.0, 0.0};
  cd v{1.0, 0.0};
};

struct RangeVerdict {
  double beta_estimate = 0.0;
  RangeClass classification = RangeClass::Undetermined;
  double decay_ratio = 1.0; // last ratio of successive samples
  double horizon_used = 0.0;
  std::vector<double> times;   // sample times
  std::vector<double> samples; // kappa(phi_{s,t}(z); d phi_{s,t}(v)) at those times
  std::vector<RangeProbe> probes;
};

struct RangeCriteria {
  double zero_eps = 1e-8;
  double decay_ratio = 0.95;
  std::size_t decay_run = 5;
  double stagnation_rel = 1e-6;
  double stagnation_floor = 1e-4;
};

/// Horizon schedule t = s + 2^j, j = 0..6.
inline std::vector<double> default_horizon_schedule(double s) {
  std::vector<double> t;
  for (int j = 0; j <= 6; ++j) t.push_back(s + std::ldexp(1.0, j));
  return t;
}

/// Classifies a non-increasing sequence of metric samples.
inline RangeClass classify_samples(const std::vector<double> &v, const RangeCriteria &c,
                                   double *last_ratio = nullptr) {
  auto ratio = [&](std::size_t j) { return v[j - 1] > 0.0 ? v[j] / v[j - 1] : 0.0; };
  const std::size_t n = v.size();
  if (last_ratio) *last_ratio = n >= 2 ? ratio(n - 1) : 1.0;
  if (n >= 2 && v.back() < c.zero_eps && n > c.decay_run) {
    bool decaying = true;
    for (std::size_t j = n - c.decay_run; j < n; ++j) decaying = decaying && ratio(j) <= c.decay_ratio;
    if (decaying) return RangeClass::Plane;
  }
  if (n >= 2 && v.back() > c.stagnation_floor &&
      (v[n - 2] - v[n - 1]) / v[n - 2] < c.stagnation_rel)
    return RangeClass::Disc;
  return RangeClass::Undetermined;
}

/// Samples kappa_D(phi_{s,t}(z); (d phi_{s,t})_z v) along the schedule, propagating the
/// derivative through the first-variation equation d delta / dt = G'(phi, t) delta.
inline RangeVerdict beta_estimate(const TimeFieldSpec &G, const RangeProbe &probe,
                                  std::vector<double> schedule = {},
                                  const RangeCriteria &criteria = {}, bool validate = true) {
  detail::require(probe.v != 0.0, "beta_estimate: v must be nonzero");
  detail::require(std::abs(probe.z) < 1.0, "beta_estimate: |z| must be < 1");
  if (schedule.empty()) schedule = default_horizon_schedule(probe.s);
  detail::require(std::is_sorted(schedule.begin(), schedule.end()) && schedule.front() > probe.s,
                  "beta_estimate: schedule must increase from beyond s");
  if (validate) {
    EvolveOptions eo;
    validate_frozen(G, probe.s, schedule.back(), eo);
  }

  using S = std::array<cd, 2>;
  OdeOptions opt;
  opt.rel_tol = 1e-13;
  opt.abs_tol = 1e-300; // both components may decay geometrically; control is relative
  auto rhs = [&](double t, const S &y, S &dy) {
    dy[0] = G(y[0], t);
    dy[1] = G.deriv(y[0], t) * y[1];
  };

  RangeVerdict out;
  out.probes = {probe};
  S y{probe.z, probe.v};
  double t = probe.s;
  out.times.push_back(t);
  out.samples.push_back(kobayashi_metric_disc(DiscPoint(probe.z), probe.v));
  for (double next : schedule) {
    y = integrate_dopri5(rhs, t, next, y, opt, gen_detail::InsideDisc{}).y;
    t = next;
    out.times.push_back(t);
    out.samples.push_back(kobayashi_metric_unchecked(y[0], y[1]));
  }
  out.beta_estimate = out.samples.back();
  out.horizon_used = t;
  out.classification = classify_samples(out.samples, criteria, &out.decay_ratio);
  return out;
}

/// Plane if any probe shows beta = 0; Disc if all stagnate at positive values; else Undetermined.
inline RangeVerdict classify_range(const TimeFieldSpec &G, const std::vector<RangeProbe> &probes,
                                   const RangeCriteria &criteria = {}) {
  detail::require(!probes.empty(), "classify_range: probes must be nonempty");
  double s_min = probes.front().s, t_max = 0.0;
  for (const auto &p : probes) {
    s_min = std::min(s_min, p.s);
    t_max = std::max(t_max, default_horizon_schedule(p.s).back());
  }
  EvolveOptions eo;
  validate_frozen(G, s_min, t_max, eo);

  RangeVerdict agg;
  bool first = true;
  auto rank = [](RangeClass c) {
    return c == RangeClass::Plane ? 2 : c == RangeClass::Undetermined ? 1 : 0;
  };
  for (const auto &p : probes) {
    RangeVerdict v = beta_estimate(G, p, {}, criteria, false);
    if (first || rank(v.classification) > rank(agg.classification)) {
      agg = v;
      first = false;
    }
  }
  agg.probes = probes;
  return agg;
}

} // namespace loewner
