#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace loewner {

/// Radial equations are driven by boundary points of the disc, chordal ones by real numbers.
enum class Codomain { Unimodular, Real };
enum class Interpolation { PiecewiseConstant, PiecewiseLinear };

/// A driving function k(t). Presets (constant, c*sqrt(t)) are defined for all t >= 0;
/// tables are defined on [times.front(), times.back()].
///
/// A piecewise-constant table holds values[j] on [times[j], times[j+1]); the last sample is
/// the value at the horizon itself.
class DrivingTerm {
public:
  enum class Kind { Constant, Sqrt, Table };

  static DrivingTerm constant(cd c, Codomain codomain) {
    if (codomain == Codomain::Unimodular)
      detail::require(std::abs(std::abs(c) - 1.0) < 1e-12,
                      "make_constant: radial driving value must be unimodular");
    else
      detail::require(c.imag() == 0.0, "make_constant: chordal driving value must be real");
    DrivingTerm d(Kind::Constant, codomain, Interpolation::PiecewiseConstant);
    d.scale_ = c;
    return d;
  }

  static DrivingTerm sqrt_power(double c) {
    DrivingTerm d(Kind::Sqrt, Codomain::Real, Interpolation::PiecewiseLinear);
    d.scale_ = c;
    return d;
  }

  static DrivingTerm table(std::vector<double> times, std::vector<cd> values,
                           Interpolation interp, Codomain codomain) {
    detail::require(!times.empty(), "make_table: empty table");
    detail::require(times.size() == values.size(), "make_table: times/values length mismatch");
    for (std::size_t j = 0; j + 1 < times.size(); ++j)
      detail::require(times[j] < times[j + 1], "make_table: times must be strictly increasing");
    for (const cd &v : values) {
      if (codomain == Codomain::Unimodular)
        detail::require(std::abs(std::abs(v) - 1.0) < 1e-12,
                        "make_table: radial driving values must be unimodular");
      else
        detail::require(v.imag() == 0.0, "make_table: chordal driving values must be real");
    }
    DrivingTerm d(Kind::Table, codomain, interp);
    d.times_ = std::move(times);
    d.values_ = std::move(values);
    return d;
  }

  Kind kind() const { return kind_; }
  Codomain codomain() const { return codomain_; }
  Interpolation interpolation() const { return interp_; }
  const std::vector<double> &times() const { return times_; }
  const std::vector<cd> &values() const { return values_; }

  double start() const { return kind_ == Kind::Table ? times_.front() : 0.0; }
  double horizon() const {
    return kind_ == Kind::Table ? times_.back() : std::numeric_limits<double>::infinity();
  }

  /// True when the driving is frozen on cells, so per-cell exact or smooth integration applies.
  bool piecewise_constant() const {
    return kind_ == Kind::Constant ||
           (kind_ == Kind::Table && interp_ == Interpolation::PiecewiseConstant);
  }

  cd value_at(double t) const {
    switch (kind_) {
    case Kind::Constant:
      return scale_;
    case Kind::Sqrt:
      detail::require(t >= 0.0, "value_at: negative time");
      return scale_ * std::sqrt(t);
    case Kind::Table:
      break;
    }
    const std::size_t j = cell_index(t);
    if (interp_ == Interpolation::PiecewiseConstant || j + 1 == times_.size()) return values_[j];
    return interpolate(j, t);
  }

  double real_value_at(double t) const { return value_at(t).real(); }

  /// Left limit k(t-); differs from value_at only at the jumps of a piecewise-constant table.
  cd left_value(double t) const {
    if (kind_ != Kind::Table || interp_ == Interpolation::PiecewiseLinear) return value_at(t);
    const std::size_t j = cell_index(t);
    if (j > 0 && t <= times_[j]) return values_[j - 1];
    return values_[j];
  }

  /// Points of [a, b] where the driving may be non-smooth, with a and b themselves at the ends.
  std::vector<double> breakpoints(double a, double b) const {
    std::vector<double> out{a};
    if (kind_ == Kind::Table) {
      auto it = std::upper_bound(times_.begin(), times_.end(), a);
      for (; it != times_.end() && *it < b; ++it) {
        const auto i = static_cast<std::size_t>(it - times_.begin());
        // A piecewise-constant table without a jump here needs no break.
        if (interp_ == Interpolation::PiecewiseConstant && i > 0 && values_[i] == values_[i - 1]) continue;
        out.push_back(*it);
      }
    }
    if (b > a) out.push_back(b);
    return out;
  }

  void check_range(double a, double b) const {
    detail::require(a >= start() - slack(a) && b <= horizon() + slack(b),
                    "driving: time interval exceeds the driving horizon");
  }

private:
  DrivingTerm(Kind k, Codomain c, Interpolation i) : kind_(k), codomain_(c), interp_(i) {}

  static double slack(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

  std::size_t cell_index(double t) const {
    if (t < times_.front() - slack(t) || t > times_.back() + slack(t))
      throw PreconditionError("value_at: t = " + std::to_string(t) +
                              " lies outside the table horizon");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.begin()) return 0;
    return static_cast<std::size_t>(it - times_.begin()) - 1;
  }

  cd interpolate(std::size_t j, double t) const {
    const double lambda = (t - times_[j]) / (times_[j + 1] - times_[j]);
    if (codomain_ == Codomain::Real)
      return values_[j] + lambda * (values_[j + 1] - values_[j]);
    // Unimodular samples are joined along the shorter boundary arc.
    const double dtheta = std::arg(values_[j + 1] / values_[j]);
    return values_[j] * std::polar(1.0, lambda * dtheta);
  }

  Kind kind_;
  Codomain codomain_;
  Interpolation interp_;
  cd scale_{0.0, 0.0};
  std::vector<double> times_;
  std::vector<cd> values_;
};

inline DrivingTerm make_constant(cd c, Codomain codomain) {
  return DrivingTerm::constant(c, codomain);
}
inline DrivingTerm make_sqrt(double c) { return DrivingTerm::sqrt_power(c); }
inline DrivingTerm make_table(std::vector<double> times, std::vector<cd> values,
                              Interpolation interp, Codomain codomain) {
  return DrivingTerm::table(std::move(times), std::move(values), interp, codomain);
}
inline cd value_at(const DrivingTerm &d, double t) { return d.value_at(t); }

// ---------------------------------------------------------------------------------------------
// Seeded Brownian paths

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Counter-based: the draw for step j depends only on (seed, j).
inline double open_unit(std::uint64_t seed, std::uint64_t index, std::uint64_t lane) {
  const std::uint64_t w = splitmix64(splitmix64(seed) ^ splitmix64(2 * index + lane));
  return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace detail

/// Standard normal variate number `index` of the stream keyed by `seed` (Box-Muller).
inline double standard_normal(std::uint64_t seed, std::uint64_t index) {
  const double u1 = detail::open_unit(seed, index, 0), u2 = detail::open_unit(seed, index, 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// sqrt(kappa) * B sampled on the uniform grid t_j = j T / n, started at `start`.
struct BrownianPath {
  std::uint64_t seed = 0;
  double kappa = 0.0;
  double T = 1.0;
  std::size_t n = 1;
  std::vector<double> values;

  std::vector<double> times() const {
    std::vector<double> t(n + 1);
    for (std::size_t j = 0; j <= n; ++j) t[j] = T * static_cast<double>(j) / static_cast<double>(n);
    t[n] = T;
    return t;
  }
};

inline BrownianPath brownian_path(std::uint64_t seed, double kappa, double T, std::size_t n,
                                  double start = 0.0) {
  detail::require(kappa >= 0.0, "brownian_path: kappa must be >= 0");
  detail::require(T > 0.0, "brownian_path: T must be > 0");
  detail::require(n >= 1, "brownian_path: n must be >= 1");
  BrownianPath p{seed, kappa, T, n, std::vector<double>(n + 1)};
  const double sd = std::sqrt(kappa * T / static_cast<double>(n));
  p.values[0] = start;
  for (std::size_t j = 0; j < n; ++j)
    p.values[j + 1] = p.values[j] + (kappa == 0.0 ? 0.0 : sd * standard_normal(seed, j));
  return p;
}

/// Real, piecewise-constant driving sqrt(kappa) B_t for chordal SLE.
inline DrivingTerm brownian_driving(std::uint64_t seed, double kappa, double T, std::size_t n,
                                    double start = 0.0) {
  const BrownianPath p = brownian_path(seed, kappa, T, n, start);
  std::vector<cd> v(p.values.begin(), p.values.end());
  return make_table(p.times(), std::move(v), Interpolation::PiecewiseConstant, Codomain::Real);
}

/// Unimodular driving exp(-i sqrt(kappa) B_t) for radial SLE.
inline DrivingTerm radial_unimodular_from_brownian(std::uint64_t seed, double kappa, double T,
                                                   std::size_t n) {
  const BrownianPath p = brownian_path(seed, kappa, T, n, 0.0);
  std::vector<cd> v(p.values.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = std::polar(1.0, -p.values[j]);
  return make_table(p.times(), std::move(v), Interpolation::PiecewiseConstant,
                    Codomain::Unimodular);
}

// ---------------------------------------------------------------------------------------------
// CSV: `t,value` for real tables, `t,re,im` for unimodular ones.

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_driving_csv(std::ostream &os, const DrivingTerm &d) {
  detail::require(d.kind() == DrivingTerm::Kind::Table, "write_driving_csv: only tables export");
  const bool real = d.codomain() == Codomain::Real;
  os << (real ? "t,value\n" : "t,re,im\n");
  for (std::size_t j = 0; j < d.times().size(); ++j) {
    os << format_double(d.times()[j]) << ',' << format_double(d.values()[j].real());
    if (!real) os << ',' << format_double(d.values()[j].imag());
    os << '\n';
  }
}

inline DrivingTerm read_driving_csv(std::istream &is, Interpolation interp) {
  std::string line;
  if (!std::getline(is, line)) throw PreconditionError("driving CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  Codomain codomain;
  if (line == "t,value")
    codomain = Codomain::Real;
  else if (line == "t,re,im")
    codomain = Codomain::Unimodular;
  else
    throw PreconditionError("driving CSV: header must be `t,value` or `t,re,im`");

  std::vector<double> times;
  std::vector<cd> values;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<double> cols;
    while (std::getline(ss, field, ',')) {
      try {
        std::size_t used = 0;
        cols.push_back(std::stod(field, &used));
        if (used != field.size()) throw std::invalid_argument(field);
      } catch (const std::exception &) {
        throw PreconditionError("driving CSV: bad number on line " + std::to_string(lineno));
      }
    }
    const std::size_t want = codomain == Codomain::Real ? 2 : 3;
    if (cols.size() != want)
      throw PreconditionError("driving CSV: wrong column count on line " + std::to_string(lineno));
    times.push_back(cols[0]);
    cd v = codomain == Codomain::Real ? cd{cols[1], 0.0} : cd{cols[1], cols[2]};
    // Decimal round-off may leave |v| a few ulp away from 1.
    if (codomain == Codomain::Unimodular && std::abs(std::abs(v) - 1.0) < 1e-9) v /= std::abs(v);
    values.push_back(v);
  }
  return make_table(std::move(times), std::move(values), interp, codomain);
}

inline DrivingTerm read_driving_csv(const std::string &path, Interpolation interp) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("driving CSV: cannot open " + path);
  return read_driving_csv(in, interp);
}

} // namespace loewner
