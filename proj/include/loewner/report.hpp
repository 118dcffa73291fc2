#pragma once

// JSON serialization of the report records emitted by the command-line tool.

#include <complex>

#include <json.hpp>

#include "coefficients.hpp"
#include "generators.hpp"
#include "range.hpp"

namespace loewner {

inline constexpr const char *tool_version = "0.1.0";

inline nlohmann::json complex_json(cd z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline nlohmann::json to_json(const GeneratorVerdict &v) {
  return {{"accepted", v.accepted},
          {"max_violation", v.max_violation},
          {"witness_re", v.witness.real()},
          {"witness_im", v.witness.imag()}};
}

inline nlohmann::json to_json(const DecompositionResult &d) {
  return {{"tau_re", d.tau.real()},
          {"tau_im", d.tau.imag()},
          {"residual", d.residual},
          {"min_re_p", d.min_re_p},
          {"p_at_0", complex_json(d.p(0.0))}};
}

inline nlohmann::json to_json(const CoefficientResult &c) {
  return {{"s", c.s},
          {"a2", complex_json(c.a2)},
          {"a3", complex_json(c.a3)},
          {"b2", complex_json(c.b2)},
          {"b3", complex_json(c.b3)},
          {"bounds_pass", c.bounds_pass},
          {"error_budget", c.error_budget}};
}

inline nlohmann::json to_json(const RangeVerdict &r) {
  nlohmann::json probes = nlohmann::json::array();
  for (const auto &p : r.probes)
    probes.push_back({{"s", p.s}, {"z", complex_json(p.z)}, {"v", complex_json(p.v)}});
  return {{"beta_estimate", r.beta_estimate},
          {"classification", to_string(r.classification)},
          {"decay_ratio", r.decay_ratio},
          {"horizon_used", r.horizon_used},
          {"times", r.times},
          {"samples", r.samples},
          {"probes", probes}};
}

} // namespace loewner
